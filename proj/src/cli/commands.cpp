#include "secpol/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "secpol/cli/run_config.hpp"
#include "secpol/env/episode_log.hpp"
#include "secpol/harness/agents.hpp"
#include "secpol/harness/evaluate.hpp"
#include "secpol/harness/report.hpp"
#include "secpol/harness/train.hpp"
#include "secpol/rl/checkpoint.hpp"
#include "secpol/world/trace.hpp"

namespace fs = std::filesystem;

namespace secpol {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RunConfig config_or_default(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return load_run_config(path);
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
}

struct TrainArgs {
    std::string config;
    std::string agent = "ppo";
    std::optional<std::uint64_t> seed;
    std::optional<long> steps;
    std::optional<int> workers;
    std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = config_or_default(a.config);
    if (a.steps) cfg.steps = *a.steps;
    if (a.workers) cfg.workers = *a.workers;
    cfg.validate();
    const std::uint64_t seed = a.seed.value_or(1);
    const AgentKind kind = a.agent == "dqn" ? AgentKind::Dqn : AgentKind::Ppo;

    fs::path dir;
    if (!a.out.empty()) {
        dir = a.out;
    } else {
        const char* env_root = std::getenv(kRunRootEnv);
        const fs::path root = env_root && *env_root ? fs::path(env_root) : fs::path(cfg.run_root);
        dir = root / (timestamp() + "-" + a.agent + "-seed" + std::to_string(seed));
    }
    fs::create_directories(dir);
    write_text(dir / "config.ini", to_ini(cfg));

    std::ofstream log(dir / "train.log");
    TrainOptions opt;
    opt.kind = kind;
    opt.env = cfg.env_config();
    opt.dqn = cfg.dqn;
    opt.ppo = cfg.ppo;
    opt.curriculum = cfg.curriculum();
    opt.seed = seed;
    opt.steps = cfg.steps;
    opt.workers = cfg.workers;
    opt.checkpoint_dir = dir;
    opt.progress = [&log](const std::string& line) { log << line << '\n' << std::flush; };

    const TrainResult r = train(opt);
    write_curve_csv(dir / "curve.csv", r.curve);
    for (const auto& w : r.warnings) {
        err << "warning: " << w << '\n';
        log << "warning: " << w << '\n';
    }
    out << "run directory: " << dir.string() << '\n'
        << "agent: " << to_string(kind) << ", env steps: " << r.env_steps << ", updates: " << r.updates
        << ", episodes: " << r.curve.size() << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::vector<std::string> positional;
    std::string baseline;
    std::optional<int> episodes;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

void write_scenarios_csv(const fs::path& path, const std::vector<EpisodeStats>& episodes) {
    std::ostringstream s;
    s << "episode,seed,scenario,kind,baseline_blockable,outcome,first_event_step,concluded_step,targeted\n";
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        for (const auto& sc : episodes[i].scenarios) {
            s << i << ',' << episodes[i].seed << ',' << sc.id << ',' << to_string(sc.kind) << ','
              << (sc.baseline_blockable ? 1 : 0) << ',' << to_string(sc.outcome) << ','
              << (sc.first_event_step ? std::to_string(*sc.first_event_step) : "") << ','
              << (sc.concluded_step ? std::to_string(*sc.concluded_step) : "") << ','
              << (sc.targeted ? 1 : 0) << '\n';
        }
    }
    write_text(path, s.str());
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    std::string ckpt;
    std::string config;
    if (a.baseline.empty()) {
        if (a.positional.empty()) throw UsageError("eval needs a checkpoint or --baseline");
        if (a.positional.size() > 2) throw UsageError("eval takes at most a checkpoint and a config");
        ckpt = a.positional[0];
        if (a.positional.size() == 2) config = a.positional[1];
    } else {
        if (a.positional.size() > 1) throw UsageError("eval --baseline takes at most a config");
        if (!a.positional.empty()) config = a.positional[0];
    }
    RunConfig cfg = config_or_default(config);
    if (a.episodes) cfg.eval_episodes = *a.episodes;
    if (a.seed) cfg.eval_seed = *a.seed;
    cfg.validate();

    std::unique_ptr<Agent> agent;
    if (a.baseline == "static") {
        agent = make_baseline(BaselineKind::StaticPolicy);
    } else if (a.baseline == "ml-human") {
        agent = make_baseline(BaselineKind::MlHumanDelay);
    } else if (!a.baseline.empty()) {
        throw UsageError("unknown baseline '" + a.baseline + "'");
    } else {
        LoadedAgent loaded = load_checkpoint(ckpt);
        if (auto* d = std::get_if<DqnAgent>(&loaded)) {
            agent = std::make_unique<DqnPolicy>(std::make_shared<const DqnAgent>(std::move(*d)));
        } else {
            agent = std::make_unique<PpoPolicy>(std::make_shared<const PpoAgent>(std::get<PpoAgent>(std::move(loaded))));
        }
    }

    const EvalResult r = evaluate(*agent, cfg.env_config(), cfg.eval_suite());
    MetricsReport unblockable =
        compute_metrics(r.episodes, [](const ScenarioStats& s) { return !s.baseline_blockable; });
    unblockable.name = r.report.name;

    const fs::path dir = a.out;
    fs::create_directories(dir);
    write_metrics_csv(dir / "metrics.csv", r.report);
    write_metrics_csv(dir / "metrics_unblockable.csv", unblockable);
    write_scenarios_csv(dir / "scenarios.csv", r.episodes);

    const auto& m = r.report;
    out << m.name << ": episodes " << m.episodes << ", mitigation " << fmt_opt(m.mitigation_rate)
        << " (unblockable " << fmt_opt(unblockable.mitigation_rate) << "), tpr " << fmt_opt(m.tpr) << ", fpr "
        << fmt_opt(m.fpr) << ", response median " << fmt_opt(m.response_median_s) << " s, updates/day "
        << fmt_opt(m.policy_updates_per_day) << ", outstanding compliance " << fmt_opt(m.outstanding_compliance)
        << '\n'
        << "wrote " << (dir / "metrics.csv").string() << '\n';
    return kExitOk;
}

struct ReportArgs {
    std::vector<std::string> files;
    std::string format = "both";
    std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
    if (a.files.empty()) throw UsageError("report needs at least one input file");
    std::vector<TableRow> rows;
    for (const auto& f : a.files) {
        auto part = load_rows(f);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const bool md = a.format != "csv";
    const bool csv = a.format != "md";
    if (md) out << render_markdown(rows);
    if (md && csv) out << '\n';
    if (csv) out << render_csv(rows);
    if (!a.out.empty()) {
        const fs::path prefix = a.out;
        if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
        if (md) write_text(prefix.string() + ".md", render_markdown(rows));
        if (csv) write_text(prefix.string() + ".csv", render_csv(rows));
    }
    return kExitOk;
}

struct ReplayArgs {
    std::string trace;
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_replay(const ReplayArgs& a, std::ostream& out) {
    const RunConfig cfg = config_or_default(a.config);
    auto events = load_trace(a.trace);
    SecurityEnv env(cfg.env_config());
    env.reset_with(a.seed, {}, std::move(events));

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw std::runtime_error("cannot write " + a.out);
    }
    EpisodeLogWriter log(a.out.empty() ? out : file);
    StaticPolicy noop;
    run_episode(noop, env, a.seed, &log);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive cloud security policy simulator", "secpol"};
    app.require_subcommand(1);

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "Train a DQN or PPO agent through the curriculum");
    train_cmd->add_option("config", ta.config, "INI run configuration");
    train_cmd->add_option("--agent", ta.agent, "dqn or ppo")->check(CLI::IsMember({"dqn", "ppo"}));
    train_cmd->add_option("--seed", ta.seed, "Training seed (default 1)");
    train_cmd->add_option("--steps", ta.steps, "Environment step budget")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--workers", ta.workers, "Rollout worker threads")->check(CLI::PositiveNumber);
    train_cmd->add_option("--out", ta.out, "Run directory (default <run_root>/<timestamp>-<agent>-seed<N>)");

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint or a baseline on held-out episodes");
    eval_cmd->add_option("inputs", ea.positional, "[checkpoint] [config]");
    eval_cmd->add_option("--baseline", ea.baseline, "static or ml-human")
        ->check(CLI::IsMember({"static", "ml-human"}));
    eval_cmd->add_option("--episodes", ea.episodes, "Number of episodes")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--seed", ea.seed, "Suite seed");
    eval_cmd->add_option("--out", ea.out, "Output directory (default .)");

    ReportArgs ra;
    auto* report_cmd = app.add_subcommand("report", "Render a comparison table from metrics or table CSVs");
    report_cmd->add_option("files", ra.files, "Metrics or table CSV files");
    report_cmd->add_option("--format", ra.format, "md, csv or both")->check(CLI::IsMember({"md", "csv", "both"}));
    report_cmd->add_option("--out", ra.out, "Also write <PREFIX>.md and/or <PREFIX>.csv");

    ReplayArgs pa;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a trace under a NoOp agent, printing a JSON-lines log");
    replay_cmd->add_option("trace", pa.trace, "Trace CSV")->required();
    replay_cmd->add_option("config", pa.config, "INI run configuration");
    replay_cmd->add_option("--seed", pa.seed, "World seed (default 0)");
    replay_cmd->add_option("--out", pa.out, "Write the log here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(ta, out, err);
        if (eval_cmd->parsed()) return cmd_eval(ea, out);
        if (report_cmd->parsed()) return cmd_report(ra, out);
        if (replay_cmd->parsed()) return cmd_replay(pa, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace secpol
