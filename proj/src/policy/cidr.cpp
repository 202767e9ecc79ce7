#include "secpol/policy/cidr.hpp"

#include <arpa/inet.h>
#include <charconv>
#include <vector>

namespace secpol {

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
    if (text.empty() || text.size() > 15) return std::nullopt;
    const std::string buf(text);
    in_addr addr{};
    if (inet_pton(AF_INET, buf.c_str(), &addr) != 1) return std::nullopt;
    return ntohl(addr.s_addr);
}

std::string format_ipv4(std::uint32_t addr) {
    return std::to_string(addr >> 24) + "." + std::to_string((addr >> 16) & 0xff) + "." +
           std::to_string((addr >> 8) & 0xff) + "." + std::to_string(addr & 0xff);
}

Cidr::Cidr(std::uint32_t base, int prefix) : prefix_(prefix) { base_ = base & mask(); }

std::uint32_t Cidr::mask() const {
    return prefix_ == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix_);
}

std::optional<Cidr> Cidr::parse(std::string_view text) {
    const auto slash = text.find('/');
    const auto addr = parse_ipv4(text.substr(0, slash));
    if (!addr) return std::nullopt;
    if (slash == std::string_view::npos) return Cidr(*addr, 32);
    const auto len = text.substr(slash + 1);
    int prefix = -1;
    const auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), prefix);
    if (ec != std::errc{} || ptr != len.data() + len.size() || prefix < 0 || prefix > 32) {
        return std::nullopt;
    }
    return Cidr(*addr, prefix);
}

std::string Cidr::str() const { return format_ipv4(base_) + "/" + std::to_string(prefix_); }

bool covered_by_union(const Cidr& target, std::span<const Cidr> cover) {
    std::vector<Cidr> relevant;
    for (const auto& c : cover) {
        if (c.contains(target)) return true;
        if (c.intersects(target)) relevant.push_back(c);
    }
    if (relevant.empty() || target.prefix() == 32) return false;
    // Every relevant prefix is strictly inside target here, so splitting terminates.
    const int p = target.prefix() + 1;
    const Cidr lower(target.base(), p);
    const Cidr upper(target.base() | (std::uint32_t{1} << (32 - p)), p);
    return covered_by_union(lower, relevant) && covered_by_union(upper, relevant);
}

std::string PortRange::str() const {
    return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
}

}  // namespace secpol
