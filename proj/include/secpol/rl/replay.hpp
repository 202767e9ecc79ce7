#pragma once

#include <cstdint>
#include <vector>

#include "secpol/common/rng.hpp"
#include "secpol/env/features.hpp"

namespace secpol {

struct Experience {
    StateVector s{};
    int a = 0;
    double r = 0.0;
    StateVector s_next{};
    bool done = false;
    bool operator==(const Experience&) const = default;
};

/// Fixed-capacity circular buffer with FIFO eviction.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 50000);

    void push(const Experience& e);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t insertions() const { return insertions_; }

    /// i-th stored item, oldest first.
    const Experience& at(std::size_t i) const;
    /// Uniform draws with replacement. Throws std::logic_error when underfull.
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::vector<Experience> items_;
    std::size_t head_ = 0;  // next write position once full
    std::uint64_t insertions_ = 0;
};

}  // namespace secpol
