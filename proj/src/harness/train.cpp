#include "secpol/harness/train.hpp"

#include <cstdio>
#include <fstream>
#include <thread>

namespace secpol {

namespace {

struct Worker {
    SecurityEnv env;
    Rng rng;
    std::uint64_t seed_base = 0;
    long episodes_started = 0;
    bool need_reset = true;
    double ep_return = 0.0;
    StateVector obs{};
    std::vector<double> finished;  // returns completed since last drain
};

void reset_worker(Worker& w, const CurriculumPhase& phase, const RewardConfig& base, int base_len) {
    w.env.set_mix(phase.mix);
    w.env.set_episode_len(phase.episode_len.value_or(base_len));
    w.env.set_rewards(phase.rewards ? *phase.rewards : base);
    w.obs = w.env.reset(derive_seed(w.seed_base, static_cast<std::uint64_t>(w.episodes_started++)));
    w.ep_return = 0.0;
    w.need_reset = false;
}

std::vector<Worker> make_workers(const TrainOptions& o) {
    std::vector<Worker> ws;
    for (int i = 0; i < o.workers; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        ws.push_back(Worker{SecurityEnv(o.env), Rng(derive_seed(o.seed, 2000 + idx)), derive_seed(o.seed, 1000 + idx)});
    }
    return ws;
}

Rollout collect(Worker& w, const PpoAgent& agent, int n, const CurriculumPhase& phase, const RewardConfig& base,
                int base_len) {
    Rollout seg;
    std::vector<double> rewards, values;
    std::vector<bool> dones;
    for (int k = 0; k < n; ++k) {
        if (w.need_reset) reset_worker(w, phase, base, base_len);
        const auto step = agent.act(w.obs, w.rng);
        const auto t = w.env.step(step.action);
        seg.states.push_back(w.obs);
        seg.actions.push_back(step.action);
        seg.log_probs.push_back(step.log_prob);
        values.push_back(step.value);
        rewards.push_back(t.r);
        dones.push_back(t.done);
        w.ep_return += t.r;
        w.obs = t.s_next;
        if (t.done) {
            w.finished.push_back(w.ep_return);
            w.need_reset = true;
        }
    }
    values.push_back(w.need_reset ? 0.0 : agent.value(w.obs));
    auto gae = compute_gae(rewards, values, dones, agent.cfg.gamma, agent.cfg.lambda);
    seg.advantages = std::move(gae.advantages);
    seg.returns = std::move(gae.returns);
    return seg;
}

class PhaseTracker {
public:
    PhaseTracker(const TrainOptions& o, TrainResult& r) : o_(o), r_(r) {}

    std::size_t current() const { return o_.curriculum.phase_for(completed_); }

    /// Appends finished returns in worker order and checkpoints on phase change.
    template <typename SaveFn>
    void drain(std::vector<Worker>& ws, SaveFn&& save) {
        for (auto& w : ws) {
            for (double ret : w.finished) {
                const auto before = current();
                r_.curve.push_back({completed_, ret, o_.curriculum.phases[before].name});
                ++completed_;
                if (current() != before) checkpoint(before, save);
            }
            w.finished.clear();
        }
    }

    template <typename SaveFn>
    void checkpoint(std::size_t phase, SaveFn&& save) {
        if (o_.checkpoint_dir.empty()) return;
        const auto path = o_.checkpoint_dir / ("phase" + std::to_string(phase + 1) + "-" + o_.curriculum.phases[phase].name + ".ckpt");
        save(path);
        r_.checkpoints.push_back(path);
    }

private:
    const TrainOptions& o_;
    TrainResult& r_;
    long completed_ = 0;
};

void report(const TrainOptions& o, const std::string& msg) {
    if (o.progress) o.progress(msg);
}

void train_ppo(const TrainOptions& o, TrainResult& r) {
    auto agent = std::make_shared<PpoAgent>(o.ppo, derive_seed(o.seed, 7));
    auto ws = make_workers(o);
    PhaseTracker phases(o, r);
    const auto save = [&](const std::filesystem::path& p) { save_checkpoint(p, *agent); };
    const int horizon = o.ppo.horizon;
    if (o.steps < horizon) {
        r.warnings.push_back("step budget " + std::to_string(o.steps) + " is below one PPO horizon (" +
                             std::to_string(horizon) + "); no updates performed");
    }
    while (r.env_steps + horizon <= o.steps) {
        const auto& phase = o.curriculum.phases[phases.current()];
        std::vector<Rollout> segs(ws.size());
        const auto share = [&](std::size_t i) {
            const int base = horizon / o.workers;
            return base + (static_cast<int>(i) < horizon % o.workers ? 1 : 0);
        };
        if (ws.size() == 1) {
            segs[0] = collect(ws[0], *agent, share(0), phase, o.env.rewards, o.env.episode_len);
        } else {
            std::vector<std::thread> threads;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                threads.emplace_back([&, i] { segs[i] = collect(ws[i], *agent, share(i), phase, o.env.rewards, o.env.episode_len); });
            }
            for (auto& t : threads) t.join();
        }
        Rollout all;
        for (const auto& s : segs) all.append(s);
        r.env_steps += horizon;
        agent->steps = r.env_steps;
        const auto st = agent->update(std::move(all));
        ++r.updates;
        phases.drain(ws, save);
        char buf[200];
        std::snprintf(buf, sizeof buf, "update %ld steps %ld phase %s entropy %.3f kl %.4f episodes %zu",
                      r.updates, r.env_steps, phase.name.c_str(), st.entropy, st.approx_kl, r.curve.size());
        report(o, buf);
    }
    r.ppo = agent;
    if (!o.checkpoint_dir.empty()) {
        const auto p = o.checkpoint_dir / "final.ckpt";
        save(p);
        r.checkpoints.push_back(p);
    }
}

void train_dqn(const TrainOptions& o, TrainResult& r) {
    auto agent = std::make_shared<DqnAgent>(o.dqn, derive_seed(o.seed, 7));
    auto ws = make_workers(o);
    PhaseTracker phases(o, r);
    const auto save = [&](const std::filesystem::path& p) { save_checkpoint(p, *agent); };
    if (o.steps < o.dqn.learning_starts + o.dqn.train_every) {
        r.warnings.push_back("step budget " + std::to_string(o.steps) + " ends before the first DQN update");
    }
    while (r.env_steps < o.steps) {
        for (auto& w : ws) {
            if (r.env_steps >= o.steps) break;
            if (w.need_reset) reset_worker(w, o.curriculum.phases[phases.current()], o.env.rewards, o.env.episode_len);
            const auto a = agent->select(w.obs);
            const auto t = w.env.step(a);
            if (agent->observe({w.obs, a, t.r, t.s_next, t.done})) ++r.updates;
            ++r.env_steps;
            w.ep_return += t.r;
            w.obs = t.s_next;
            if (t.done) {
                w.finished.push_back(w.ep_return);
                w.need_reset = true;
            }
        }
        phases.drain(ws, save);
        if (r.env_steps % 10000 == 0) {
            report(o, "steps " + std::to_string(r.env_steps) + " episodes " + std::to_string(r.curve.size()) +
                          " epsilon " + std::to_string(agent->epsilon()));
        }
    }
    r.dqn = agent;
    if (!o.checkpoint_dir.empty()) {
        const auto p = o.checkpoint_dir / "final.ckpt";
        save(p);
        r.checkpoints.push_back(p);
    }
}

}  // namespace

TrainResult train(const TrainOptions& options) {
    if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (options.steps < 0) throw std::invalid_argument("step budget must be non-negative");
    options.curriculum.validate();
    options.env.validate();
    TrainResult r;
    if (options.kind == AgentKind::Ppo) {
        options.ppo.validate();
        train_ppo(options, r);
    } else {
        options.dqn.validate();
        train_dqn(options, r);
    }
    for (const auto& w : r.warnings) report(options, "warning: " + w);
    return r;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "episode,return,phase\n";
    char buf[64];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof buf, "%.10g", p.episode_return);
        out << p.episode << ',' << buf << ',' << p.phase << '\n';
    }
}

}  // namespace secpol
