#include "secpol/rl/replay.hpp"

#include <stdexcept>

namespace secpol {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(const Experience& e) {
    ++insertions_;
    if (items_.size() < capacity_) {
        items_.push_back(e);
        return;
    }
    items_[head_] = e;
    head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("replay index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
    if (items_.size() < batch || batch == 0) throw std::logic_error("replay buffer holds fewer items than the batch");
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(items_.size()) - 1));
    return idx;
}

}  // namespace secpol
