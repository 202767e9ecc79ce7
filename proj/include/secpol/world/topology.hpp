#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "secpol/policy/config.hpp"

namespace secpol {

struct InstanceSpec {
    std::string id;
    Tier tier = Tier::Web;
    Zone zone = Zone::Public;
    int monitoring = 1;
    bool operator==(const InstanceSpec&) const = default;
};

struct PrincipalSpec {
    std::string id;
    Privilege privilege = Privilege::ReadOnly;
    bool restricted = false;
    bool operator==(const PrincipalSpec&) const = default;
};

class TopologyError : public std::invalid_argument {
public:
    TopologyError(std::string rule, const std::string& msg)
        : std::invalid_argument(rule + ": " + msg), rule_(std::move(rule)) {}
    const std::string& rule() const { return rule_; }

private:
    std::string rule_;
};

/// Validation rules:
///   T1 Db-tier instances must sit in the Private zone
///   T2 instance and principal ids are unique and non-empty
///   T3 baseline monitoring level in [0, 2]
struct TopologyConfig {
    std::vector<InstanceSpec> instances;
    std::vector<PrincipalSpec> principals;

    /// Two public web servers, one private database, two admins and one
    /// restricted service account.
    static TopologyConfig default_topology();
    static TopologyConfig build(int web, int db, Zone db_zone, int admins, int power_users,
                                int service_accounts, int read_only);

    void validate() const;  // throws TopologyError naming the rule
    bool operator==(const TopologyConfig&) const = default;
};

/// Addresses the baseline denies outright (a threat-intelligence block list).
inline const Cidr kBlocklistCidr(0xcb007100u, 24);  // 203.0.113.0/24

/// Static baseline: web ports open to the world, database and SSH reachable
/// from inside the VPC only, block-listed range denied, flow logging on in
/// both zones.
SecurityConfig baseline_config(const TopologyConfig& topology);

}  // namespace secpol
