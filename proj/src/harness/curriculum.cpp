#include "secpol/harness/curriculum.hpp"

#include <stdexcept>

namespace secpol {

Curriculum Curriculum::defaults(double train_blockable, int episode_len, int onset_tail) {
    Curriculum c;
    CurriculumPhase single{"single-attack", single_attack_mix(), 60, std::nullopt};
    RewardConfig boosted;
    boosted.r1 = 20.0;
    single.rewards = boosted;
    CurriculumPhase multi{"multi-threat", multi_threat_mix(), 100, std::nullopt};
    CurriculumPhase full{"full", full_mix(), 0, std::nullopt};
    for (auto* p : {&single, &multi, &full}) {
        p->mix.baseline_blockable_fraction = train_blockable;
        p->mix.onset_tail = onset_tail;
        if (episode_len > 0) p->episode_len = episode_len;
        c.phases.push_back(*p);
    }
    return c;
}

std::size_t Curriculum::phase_for(long completed) const {
    long cum = 0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i].episodes <= 0) return i;
        cum += phases[i].episodes;
        if (completed < cum) return i;
    }
    return phases.empty() ? 0 : phases.size() - 1;
}

void Curriculum::validate() const {
    if (phases.empty()) throw std::invalid_argument("curriculum needs at least one phase");
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const auto& p = phases[i];
        if (p.episodes < 0) throw std::invalid_argument("phase '" + p.name + "': negative episode count");
        if (p.episodes == 0 && i + 1 != phases.size()) {
            throw std::invalid_argument("phase '" + p.name + "': only the last phase may be open-ended");
        }
        p.mix.validate();
        if (p.rewards) p.rewards->validate();
        if (p.episode_len && *p.episode_len < 1) {
            throw std::invalid_argument("phase '" + p.name + "': episode_len must be >= 1");
        }
    }
}

}  // namespace secpol
