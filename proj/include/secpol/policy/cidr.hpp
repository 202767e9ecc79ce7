#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace secpol {

std::optional<std::uint32_t> parse_ipv4(std::string_view text);
std::string format_ipv4(std::uint32_t addr);

/// IPv4 prefix. The base is always stored with host bits cleared.
class Cidr {
public:
    Cidr() = default;
    Cidr(std::uint32_t base, int prefix);

    /// Accepts "a.b.c.d" (treated as /32) or "a.b.c.d/n".
    static std::optional<Cidr> parse(std::string_view text);
    static Cidr host(std::uint32_t addr) { return Cidr(addr, 32); }
    static Cidr any() { return Cidr(0, 0); }

    std::uint32_t base() const { return base_; }
    int prefix() const { return prefix_; }
    std::uint32_t mask() const;
    std::uint32_t last() const { return base_ | ~mask(); }

    bool contains(std::uint32_t addr) const { return (addr & mask()) == base_; }
    bool contains(const Cidr& other) const {
        return other.prefix_ >= prefix_ && contains(other.base_);
    }
    bool intersects(const Cidr& other) const {
        return contains(other.base_) || other.contains(base_);
    }

    std::string str() const;

    auto operator<=>(const Cidr&) const = default;

private:
    std::uint32_t base_ = 0;
    int prefix_ = 0;
};

/// True when every address of `target` lies in at least one of `cover`.
bool covered_by_union(const Cidr& target, std::span<const Cidr> cover);

struct PortRange {
    int lo = 0;
    int hi = 65535;

    static PortRange single(int port) { return {port, port}; }
    static PortRange all() { return {0, 65535}; }
    bool valid() const { return 0 <= lo && lo <= hi && hi <= 65535; }
    bool contains(int port) const { return lo <= port && port <= hi; }
    bool contains(const PortRange& o) const { return lo <= o.lo && o.hi <= hi; }
    std::string str() const;

    auto operator<=>(const PortRange&) const = default;
};

}  // namespace secpol
