#include "secpol/world/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace secpol {

namespace {

constexpr std::uint32_t kAttackerOctets[] = {45, 91, 185, 194};
constexpr int kDdosSources = 8;

std::uint32_t attacker_net(Rng& rng, bool blockable) {
    if (blockable) return kBlocklistCidr.base();
    const auto o1 = kAttackerOctets[rng.uniform_int(0, 3)];
    const auto o2 = static_cast<std::uint32_t>(rng.uniform_int(0, 255));
    const auto o3 = static_cast<std::uint32_t>(rng.uniform_int(0, 255));
    return (o1 << 24) | (o2 << 16) | (o3 << 8);
}

std::vector<std::string> hosts_in(std::uint32_t net, int n, Rng& rng) {
    std::vector<std::uint32_t> last(254);
    std::iota(last.begin(), last.end(), 1u);
    rng.shuffle(last);
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(format_ipv4(net | last[static_cast<std::size_t>(i)]));
    return out;
}

template <typename T>
const T* pick(const std::vector<const T*>& v, Rng& rng) {
    if (v.empty()) return nullptr;
    return v[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(v.size()) - 1))];
}

}  // namespace

void ScenarioMix::validate() const {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ScenarioError("scenario weights must be non-negative");
        sum += w;
    }
    if (sum <= 0.0 && always.empty()) throw ScenarioError("scenario weights must not all be zero");
    if (min_count < 0 || max_count < min_count) throw ScenarioError("invalid scenario count range");
    if (baseline_blockable_fraction < 0.0 || baseline_blockable_fraction > 1.0) {
        throw ScenarioError("baseline_blockable_fraction outside [0, 1]");
    }
    if (onset_min < 1 || onset_tail < 0 || onset_jitter < 0) throw ScenarioError("invalid onset window");
}

ScenarioMix single_attack_mix() { return {}; }

ScenarioMix multi_threat_mix() {
    ScenarioMix m;
    m.always = {ScenarioKind::ConfigDrift};
    m.min_count = 2;
    m.max_count = 3;
    return m;
}

ScenarioMix full_mix() {
    ScenarioMix m;
    m.always = {ScenarioKind::ConfigDrift, ScenarioKind::BenignAdminBurst};
    m.min_count = 3;
    m.max_count = 4;
    return m;
}

std::vector<ScenarioScript> sample_scenarios(const ScenarioMix& mix, const TopologyConfig& topology,
                                             int episode_len, Rng& rng) {
    mix.validate();
    const int count = static_cast<int>(rng.uniform_int(mix.min_count, mix.max_count));
    std::vector<ScenarioKind> kinds;
    for (auto k : mix.always) {
        if (static_cast<int>(kinds.size()) < count && std::find(kinds.begin(), kinds.end(), k) == kinds.end()) {
            kinds.push_back(k);
        }
    }
    while (static_cast<int>(kinds.size()) < count) {
        double total = 0.0;
        for (int i = 0; i < kScenarioKindCount; ++i) {
            const auto k = static_cast<ScenarioKind>(i);
            if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) total += mix.weights[static_cast<std::size_t>(i)];
        }
        if (total <= 0.0) break;
        double u = rng.uniform() * total;
        ScenarioKind chosen = ScenarioKind::PortScan;
        bool found = false;
        for (int i = 0; i < kScenarioKindCount; ++i) {
            const auto k = static_cast<ScenarioKind>(i);
            const double w = mix.weights[static_cast<std::size_t>(i)];
            if (w <= 0.0 || std::find(kinds.begin(), kinds.end(), k) != kinds.end()) continue;
            chosen = k;
            found = true;
            if (u < w) break;
            u -= w;
        }
        if (!found) break;
        kinds.push_back(chosen);
    }

    const int hi = std::max(1, episode_len - mix.onset_tail);
    const int lo = std::min(mix.onset_min, hi);
    const int base = static_cast<int>(rng.uniform_int(lo, hi));

    std::vector<const InstanceSpec*> web, any_instance;
    for (const auto& i : topology.instances) {
        any_instance.push_back(&i);
        if (i.tier == Tier::Web) web.push_back(&i);
    }
    if (web.empty()) web = any_instance;
    std::vector<const PrincipalSpec*> admins, unrestricted, restricted;
    for (const auto& p : topology.principals) {
        if (p.restricted) {
            restricted.push_back(&p);
        } else {
            unrestricted.push_back(&p);
            if (p.privilege == Privilege::Admin) admins.push_back(&p);
        }
    }
    std::set<std::string> used_principals;

    std::vector<ScenarioScript> out;
    for (std::size_t n = 0; n < kinds.size(); ++n) {
        const auto kind = kinds[n];
        // Drift is not part of the attack campaign and lands at its own random step.
        const int onset = kind == ScenarioKind::ConfigDrift
                              ? static_cast<int>(rng.uniform_int(lo, hi))
                              : base + static_cast<int>(rng.uniform_int(0, mix.onset_jitter));
        ScenarioTargets t;
        t.baseline_blockable = is_attack(kind) && rng.uniform() < mix.baseline_blockable_fraction;
        const auto* target = pick(web, rng);
        if (target) t.target = target->id;
        switch (kind) {
            case ScenarioKind::PortScan:
            case ScenarioKind::WebExploit:
                t.sources = hosts_in(attacker_net(rng, t.baseline_blockable), 1, rng);
                break;
            case ScenarioKind::DDoS:
                t.sources = hosts_in(attacker_net(rng, t.baseline_blockable), kDdosSources, rng);
                break;
            case ScenarioKind::CredCompromise: {
                std::vector<const PrincipalSpec*> free;
                for (const auto* q : unrestricted) {
                    if (!used_principals.count(q->id)) free.push_back(q);
                }
                const auto* p = t.baseline_blockable ? pick(restricted, rng) : pick(free, rng);
                if (!p) p = pick(free, rng);
                if (!p) p = pick(restricted, rng);
                if (!p) continue;  // no principals: nothing to compromise
                if (!p->restricted) t.baseline_blockable = false;
                t.principal = p->id;
                used_principals.insert(p->id);
                t.logging_zone = rng.uniform() < 0.5 ? Zone::Public : Zone::Private;
                break;
            }
            case ScenarioKind::BenignAdminBurst: {
                std::vector<const PrincipalSpec*> free;
                for (const auto* p : admins.empty() ? unrestricted : admins) {
                    if (!used_principals.count(p->id)) free.push_back(p);
                }
                const auto* p = pick(free, rng);
                if (!p) continue;
                t.principal = p->id;
                used_principals.insert(p->id);
                break;
            }
            case ScenarioKind::ConfigDrift:
                break;
        }
        std::string id = "s" + std::to_string(n) + "-" + to_string(kind);
        out.push_back(make_default_script(kind, std::move(id), onset, t));
    }
    return out;
}

}  // namespace secpol
