#include "secpol/rl/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace secpol {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'C', 'P', 'O', 'L', 'C', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
public:
    explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary) {
        if (!out_) throw CheckpointError("cannot write checkpoint " + p.string());
    }
    template <typename T>
    void pod(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void doubles(const double* d, std::size_t n) { out_.write(reinterpret_cast<const char*>(d), static_cast<std::streamsize>(n * sizeof(double))); }
    void ints(const std::vector<int>& v) {
        pod(static_cast<std::uint32_t>(v.size()));
        for (int x : v) pod(static_cast<std::int32_t>(x));
    }
    void mlp(const Mlp& m) {
        ints(m.sizes());
        for (std::size_t l = 0; l < m.layer_count(); ++l) {
            doubles(m.W[l].data(), static_cast<std::size_t>(m.W[l].size()));
            doubles(m.b[l].data(), static_cast<std::size_t>(m.b[l].size()));
        }
    }
    void adam(const Adam& a) {
        pod(static_cast<std::int64_t>(a.t));
        pod(a.lr);
        pod(a.beta1);
        pod(a.beta2);
        pod(a.eps);
        pod(static_cast<std::uint32_t>(a.mW.size()));
        for (std::size_t l = 0; l < a.mW.size(); ++l) {
            pod(static_cast<std::int64_t>(a.mW[l].rows()));
            pod(static_cast<std::int64_t>(a.mW[l].cols()));
            for (const auto* m : {&a.mW[l], &a.vW[l]}) doubles(m->data(), static_cast<std::size_t>(m->size()));
            pod(static_cast<std::int64_t>(a.mb[l].size()));
            for (const auto* m : {&a.mb[l], &a.vb[l]}) doubles(m->data(), static_cast<std::size_t>(m->size()));
        }
    }
    void finish() {
        out_.flush();
        if (!out_) throw CheckpointError("write failed");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& p) : in_(p, std::ios::binary) {
        if (!in_) throw CheckpointError("cannot open checkpoint " + p.string());
    }
    template <typename T>
    T pod() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_) throw CheckpointError("truncated checkpoint");
        return v;
    }
    void doubles(double* d, std::size_t n) {
        in_.read(reinterpret_cast<char*>(d), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in_) throw CheckpointError("truncated checkpoint");
    }
    std::vector<int> ints() {
        const auto n = pod<std::uint32_t>();
        if (n > 64) throw CheckpointError("implausible layer count");
        std::vector<int> v(n);
        for (auto& x : v) {
            x = pod<std::int32_t>();
            if (x < 1 || x > (1 << 20)) throw CheckpointError("implausible layer size");
        }
        return v;
    }
    Mlp mlp() {
        Mlp m(ints());
        for (std::size_t l = 0; l < m.layer_count(); ++l) {
            doubles(m.W[l].data(), static_cast<std::size_t>(m.W[l].size()));
            doubles(m.b[l].data(), static_cast<std::size_t>(m.b[l].size()));
        }
        return m;
    }
    Adam adam(const Mlp& net) {
        Adam a(net, 1.0);
        a.t = static_cast<long>(pod<std::int64_t>());
        a.lr = pod<double>();
        a.beta1 = pod<double>();
        a.beta2 = pod<double>();
        a.eps = pod<double>();
        const auto layers = pod<std::uint32_t>();
        if (layers != a.mW.size()) throw CheckpointError("optimizer state does not match the network");
        for (std::size_t l = 0; l < layers; ++l) {
            const auto r = pod<std::int64_t>();
            const auto c = pod<std::int64_t>();
            if (r != a.mW[l].rows() || c != a.mW[l].cols()) throw CheckpointError("optimizer shape mismatch");
            doubles(a.mW[l].data(), static_cast<std::size_t>(a.mW[l].size()));
            doubles(a.vW[l].data(), static_cast<std::size_t>(a.vW[l].size()));
            if (pod<std::int64_t>() != a.mb[l].size()) throw CheckpointError("optimizer shape mismatch");
            doubles(a.mb[l].data(), static_cast<std::size_t>(a.mb[l].size()));
            doubles(a.vb[l].data(), static_cast<std::size_t>(a.vb[l].size()));
        }
        return a;
    }

private:
    std::ifstream in_;
};

void header(Writer& w, AgentKind kind, long steps) {
    for (char c : kMagic) w.pod(c);
    w.pod(kFormatVersion);
    w.pod(static_cast<std::uint8_t>(kind));
    w.pod(static_cast<std::int32_t>(kFeatureCount));
    w.pod(static_cast<std::int32_t>(kActionCount));
    w.pod(static_cast<std::int64_t>(steps));
}

void check_dims(const Mlp& m, int out, const char* what) {
    if (m.input_size() != kFeatureCount || m.output_size() != out) {
        throw CheckpointError(std::string(what) + " network has dims " + std::to_string(m.input_size()) + "->" +
                              std::to_string(m.output_size()) + ", expected " + std::to_string(kFeatureCount) + "->" +
                              std::to_string(out));
    }
}

}  // namespace

const char* to_string(AgentKind k) { return k == AgentKind::Dqn ? "dqn" : "ppo"; }

void save_checkpoint(const std::filesystem::path& path, const DqnAgent& a) {
    Writer w(path);
    header(w, AgentKind::Dqn, a.steps);
    w.pod(static_cast<std::int64_t>(a.updates));
    w.mlp(a.online);
    w.mlp(a.target);
    w.adam(a.opt);
    w.finish();
}

void save_checkpoint(const std::filesystem::path& path, const PpoAgent& a) {
    Writer w(path);
    header(w, AgentKind::Ppo, a.steps);
    w.pod(static_cast<std::int64_t>(a.updates));
    w.mlp(a.actor);
    w.mlp(a.critic);
    w.adam(a.actor_opt);
    w.adam(a.critic_opt);
    w.finish();
}

LoadedAgent load_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    char magic[8];
    for (char& c : magic) c = r.pod<char>();
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw CheckpointError(path.string() + " is not a checkpoint");
    const auto version = r.pod<std::uint32_t>();
    if (version != kFormatVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    const auto kind = r.pod<std::uint8_t>();
    const auto f = r.pod<std::int32_t>();
    const auto actions = r.pod<std::int32_t>();
    if (f != kFeatureCount) {
        throw CheckpointError("checkpoint feature count " + std::to_string(f) + " does not match expected " +
                              std::to_string(kFeatureCount));
    }
    if (actions != kActionCount) {
        throw CheckpointError("checkpoint action count " + std::to_string(actions) + " does not match expected " +
                              std::to_string(kActionCount));
    }
    const auto steps = r.pod<std::int64_t>();
    const auto updates = r.pod<std::int64_t>();
    if (kind == static_cast<std::uint8_t>(AgentKind::Dqn)) {
        DqnAgent a;
        a.steps = static_cast<long>(steps);
        a.updates = static_cast<long>(updates);
        a.online = r.mlp();
        a.target = r.mlp();
        check_dims(a.online, kActionCount, "Q");
        check_dims(a.target, kActionCount, "target");
        a.opt = r.adam(a.online);
        a.cfg.hidden.assign(a.online.sizes().begin() + 1, a.online.sizes().end() - 1);
        a.cfg.lr = a.opt.lr;
        return a;
    }
    if (kind == static_cast<std::uint8_t>(AgentKind::Ppo)) {
        PpoAgent a;
        a.steps = static_cast<long>(steps);
        a.updates = static_cast<long>(updates);
        a.actor = r.mlp();
        a.critic = r.mlp();
        check_dims(a.actor, kActionCount, "actor");
        check_dims(a.critic, 1, "critic");
        a.actor_opt = r.adam(a.actor);
        a.critic_opt = r.adam(a.critic);
        a.cfg.hidden.assign(a.actor.sizes().begin() + 1, a.actor.sizes().end() - 1);
        a.cfg.lr = a.actor_opt.lr;
        return a;
    }
    throw CheckpointError("unknown agent kind in checkpoint");
}

}  // namespace secpol
