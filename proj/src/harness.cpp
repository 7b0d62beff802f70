#include "harness.hpp"

#include "design.hpp"
#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdarg>
#include <limits>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace banditlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDemoScale = 1.0 / 32768.0;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BanditError(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BanditError(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw BanditError(ErrorCode::IoError, "write failed for " + path.string());
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    const int n = std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    if (n < 0) return {};
    if (static_cast<std::size_t>(n) < sizeof buf) return std::string(buf, static_cast<std::size_t>(n));
    std::string out(static_cast<std::size_t>(n) + 1, '\0');
    va_start(args, format);
    std::vsnprintf(out.data(), out.size(), format, args);
    va_end(args);
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string num(double v) { return fmt("%.17g", v); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

std::optional<double> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::uint64_t get_count(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    }
    throw BanditError(ErrorCode::ConfigError, std::string("'") + key + "' must be a nonnegative integer");
}

EnvironmentSpec parse_environment(const json& j) {
    EnvironmentSpec e;
    e.type = get_or<std::string>(j, "type", "stochastic");
    if (e.type != "stochastic" && e.type != "corrupted" && e.type != "adversarial")
        throw BanditError(ErrorCode::ConfigError, "unknown environment type '" + e.type + "'");
    e.noise = parse_noise_model(get_or<std::string>(j, "noise", "bernoulli"));
    if (j.contains("corruption")) {
        const auto& c = j.at("corruption");
        e.corruption.kind = get_or<std::string>(c, "kind", "front_loaded");
        e.corruption.budget = get_opt(c, "budget");
        e.corruption.budget_fraction = get_opt(c, "budget_fraction");
        if (c.contains("period")) e.corruption.period = get_count(c, "period");
    } else if (e.type == "corrupted") {
        e.corruption.kind = "front_loaded";
    }
    if (j.contains("sequence")) {
        const auto& s = j.at("sequence");
        e.sequence.kind = get_or<std::string>(s, "kind", "switch");
        e.sequence.at_fraction = get_or<double>(s, "at_fraction", 0.5);
        e.sequence.amplitude = get_or<double>(s, "amplitude", 0.0);
        if (s.contains("period")) e.sequence.period = get_count(s, "period");
        e.sequence.direction = get_or<std::vector<double>>(s, "direction", {});
        e.sequence.gamma = get_or<double>(s, "gamma", 0.5);
        if (s.contains("switch_interval")) e.sequence.switch_interval = get_count(s, "switch_interval");
        if (s.contains("x_prime")) e.sequence.x_prime = get_count(s, "x_prime");
        e.sequence.theta_prime = get_or<std::vector<double>>(s, "theta_prime", {});
    }
    std::string fallback = e.type;
    if (e.type == "corrupted") fallback += "_" + e.corruption.kind;
    if (e.type == "adversarial") fallback += "_" + e.sequence.kind;
    e.name = get_or<std::string>(j, "name", fallback);
    return e;
}

InstanceSpec parse_instance_json(const json& j) {
    InstanceSpec spec;
    spec.actions = j.at("actions").get<std::vector<std::vector<double>>>();
    spec.theta = j.at("theta").get<std::vector<double>>();
    if (j.contains("d")) {
        const auto d = get_count(j, "d");
        if (spec.theta.size() != d) throw BanditError(ErrorCode::ConfigError, "theta length differs from d");
        for (const auto& a : spec.actions)
            if (a.size() != d) throw BanditError(ErrorCode::ConfigError, "action length differs from d");
    }
    if (j.contains("environment")) spec.environment = parse_environment(j.at("environment"));
    return spec;
}

std::string sanitise(const std::string& s) {
    std::string out = s;
    for (auto& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<std::uint64_t> curve_points(std::uint64_t horizon) {
    std::vector<std::uint64_t> pts;
    const int steps = 200;
    for (int k = 0; k <= steps; ++k) {
        const double v = std::pow(static_cast<double>(horizon), static_cast<double>(k) / steps);
        const auto t = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(v)), 1, horizon);
        if (pts.empty() || pts.back() != t) pts.push_back(t);
    }
    if (pts.back() != horizon) pts.push_back(horizon);
    return pts;
}

class Learner {
public:
    virtual ~Learner() = default;
    virtual std::size_t choose(double u) = 0;
    virtual void update(std::size_t arm, double y) = 0;
    virtual int phase() const = 0;
    virtual std::int64_t block() const = 0;
};

class ReolbLearner final : public Learner {
public:
    explicit ReolbLearner(Reolb* r) : r_(r) {}
    std::size_t choose(double u) override { return r_->choose(u); }
    void update(std::size_t arm, double y) override { r_->update(arm, y); }
    int phase() const override { return 0; }
    std::int64_t block() const override { return r_->block(); }

private:
    Reolb* r_;
};

class BotwLearner final : public Learner {
public:
    explicit BotwLearner(Botw* b) : b_(b) {}
    std::size_t choose(double u) override { return b_->choose(u); }
    void update(std::size_t arm, double y) override { b_->update(arm, y); }
    int phase() const override { return b_->phase(); }
    std::int64_t block() const override { return b_->epoch(); }

private:
    Botw* b_;
};

class GhpLearner final : public Learner {
public:
    explicit GhpLearner(GeometricHedge* g) : g_(g) {}
    std::size_t choose(double u) override { return g_->choose(u); }
    void update(std::size_t arm, double y) override { g_->update(arm, y); }
    int phase() const override { return 0; }
    std::int64_t block() const override { return 0; }

private:
    GeometricHedge* g_;
};

}  // namespace

double AlgorithmSpec::scale() const {
    if (constant_scale) return *constant_scale;
    return preset == Preset::Demo ? kDemoScale : 1.0;
}

GhpParams resolve_blackbox(const AlgorithmSpec& spec, const ActionSet& actions, std::uint64_t horizon) {
    GhpParams p = ghp_params(actions.dim(), horizon, actions.size(), spec.delta, spec.scale(), spec.c2.value_or(20.0));
    if (spec.preset == Preset::Demo)
        p.c1 = static_cast<double>(actions.dim()) *
               std::log(static_cast<double>(horizon) * static_cast<double>(actions.size()) / spec.delta);
    if (spec.c1) p.c1 = *spec.c1;
    if (spec.l0) p.l0 = *spec.l0;
    return p;
}

BanditInstance InstanceSpec::build() const {
    if (actions.empty()) throw BanditError(ErrorCode::ConfigError, "instance has no actions");
    std::vector<Vector> xs;
    for (const auto& a : actions) xs.push_back(Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size())));
    Vector th = Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    return BanditInstance::make(ActionSet::validate(xs), std::move(th));
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
    ExperimentConfig cfg;
    try {
        const json j = json::parse(text);
        cfg.version = get_or<int>(j, "version", 1);
        if (cfg.version != 1) throw BanditError(ErrorCode::ConfigError, "unsupported config version");

        const std::string preset = get_or<std::string>(j, "preset", "paper");
        if (preset == "paper")
            cfg.algorithm.preset = Preset::Paper;
        else if (preset == "demo")
            cfg.algorithm.preset = Preset::Demo;
        else
            throw BanditError(ErrorCode::ConfigError, "unknown preset '" + preset + "'");

        const json alg = j.contains("algorithm") ? j.at("algorithm") : json::object();
        if (alg.is_string()) {
            cfg.algorithm.name = alg.get<std::string>();
        } else {
            cfg.algorithm.name = get_or<std::string>(alg, "name", "reolb");
            cfg.algorithm.blackbox = get_or<std::string>(alg, "blackbox", "ghp");
            cfg.algorithm.delta = get_or<double>(alg, "delta", 0.1);
            cfg.algorithm.constant_scale = get_opt(alg, "constant_scale");
            cfg.algorithm.c1 = get_opt(alg, "c1");
            cfg.algorithm.c2 = get_opt(alg, "c2");
            cfg.algorithm.l0 = get_opt(alg, "l0");
        }
        const auto& name = cfg.algorithm.name;
        if (name != "reolb" && name != "botw" && name != "ghp")
            throw BanditError(ErrorCode::ConfigError, "unknown algorithm '" + name + "'");
        if (cfg.algorithm.blackbox != "ghp")
            throw BanditError(ErrorCode::ConfigError, "unknown black box '" + cfg.algorithm.blackbox + "'");
        if (!(cfg.algorithm.delta > 0.0 && cfg.algorithm.delta <= 0.1))
            throw BanditError(ErrorCode::ConfigError, "delta must lie in (0, 0.1]");
        if (cfg.algorithm.constant_scale && !(*cfg.algorithm.constant_scale > 0.0))
            throw BanditError(ErrorCode::ConfigError, "constant_scale must be positive");
        if (cfg.algorithm.c2 && !(*cfg.algorithm.c2 >= 20.0))
            throw BanditError(ErrorCode::ConfigError, "c2 must be at least 20");

        if (j.contains("horizons")) {
            for (const auto& h : j.at("horizons")) cfg.horizons.push_back(h.get<std::uint64_t>());
        } else if (j.contains("horizon")) {
            cfg.horizons.push_back(get_count(j, "horizon"));
        }
        if (cfg.horizons.empty()) throw BanditError(ErrorCode::ConfigError, "missing horizon");
        for (auto h : cfg.horizons)
            if (h < 1) throw BanditError(ErrorCode::ConfigError, "horizon must be at least 1");

        if (j.contains("instance_file")) {
            fs::path p = j.at("instance_file").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            cfg.instance = load_instance(p);
        } else if (j.contains("instance")) {
            cfg.instance = parse_instance_json(j.at("instance"));
        } else {
            throw BanditError(ErrorCode::ConfigError, "missing instance or instance_file");
        }

        if (j.contains("environments")) {
            for (const auto& e : j.at("environments")) cfg.environments.push_back(parse_environment(e));
        } else if (j.contains("environment")) {
            cfg.environments.push_back(parse_environment(j.at("environment")));
        } else if (cfg.instance.environment) {
            cfg.environments.push_back(*cfg.instance.environment);
        } else {
            cfg.environments.push_back(parse_environment(json::object()));
        }

        if (j.contains("seeds")) {
            const auto& s = j.at("seeds");
            if (s.is_array()) {
                for (const auto& v : s) cfg.seeds.push_back(v.get<std::uint64_t>());
            } else {
                const auto count = get_count(s, "count");
                const std::uint64_t start = s.contains("start") ? get_count(s, "start") : 1;
                for (std::uint64_t k = 0; k < count; ++k) cfg.seeds.push_back(start + k);
            }
        } else {
            cfg.seeds.push_back(1);
        }
        if (cfg.seeds.empty()) throw BanditError(ErrorCode::ConfigError, "at least one seed is required");

        if (j.contains("output")) {
            const auto& o = j.at("output");
            cfg.output_dir = get_or<std::string>(o, "dir", "out");
            cfg.svg = get_or<bool>(o, "svg", true);
            cfg.write_traces = get_or<bool>(o, "traces", true);
        }
    } catch (const json::exception& e) {
        throw BanditError(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
    }
    // Validate the instance eagerly so that bad files fail at load time.
    const BanditInstance inst = cfg.instance.build();
    for (const auto& e : cfg.environments) (void)build_environment(inst, e, cfg.horizons.front());
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    return parse_config(read_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

InstanceSpec parse_instance(const std::string& text) {
    try {
        return parse_instance_json(json::parse(text));
    } catch (const json::exception& e) {
        throw BanditError(ErrorCode::ConfigError, std::string("malformed instance: ") + e.what());
    }
}

InstanceSpec load_instance(const fs::path& path) { return parse_instance(read_file(path)); }

Environment build_environment(const BanditInstance& instance, const EnvironmentSpec& spec, std::uint64_t horizon) {
    if (spec.type == "stochastic") return Environment::stochastic(instance, spec.noise);
    if (spec.type == "corrupted") {
        const auto& c = spec.corruption;
        double budget = 0.0;
        if (c.budget) budget = *c.budget;
        if (c.budget_fraction) budget = *c.budget_fraction * static_cast<double>(horizon);
        if (c.kind == "none") return Environment::corrupted(instance, spec.noise, CorruptionSchedule::none(instance.dim()));
        if (c.kind == "front_loaded")
            return Environment::corrupted(instance, spec.noise, CorruptionSchedule::front_loaded(instance, budget));
        if (c.kind == "periodic")
            return Environment::corrupted(instance, spec.noise, CorruptionSchedule::periodic(instance, budget, c.period));
        if (c.kind == "target_optimal")
            return Environment::corrupted(instance, spec.noise, CorruptionSchedule::target_optimal(instance, budget));
        throw BanditError(ErrorCode::ConfigError, "unknown corruption kind '" + c.kind + "'");
    }
    if (spec.type == "adversarial") {
        const auto& s = spec.sequence;
        if (s.kind == "switch") {
            const auto at = static_cast<std::uint64_t>(std::llround(s.at_fraction * static_cast<double>(horizon)));
            return Environment::adversarial(instance, spec.noise, AdversarialSequence::switching(instance.theta(), at));
        }
        if (s.kind == "sinusoid") {
            Vector dir = instance.theta();
            if (!s.direction.empty())
                dir = Eigen::Map<const Vector>(s.direction.data(), static_cast<Eigen::Index>(s.direction.size()));
            if (dir.norm() == 0.0) dir = Vector::Unit(static_cast<Eigen::Index>(instance.dim()), 0);
            return Environment::adversarial(instance, spec.noise,
                                            AdversarialSequence::sinusoid(instance, dir, s.amplitude, s.period));
        }
        if (s.kind == "lowerbound") {
            if (s.theta_prime.size() != instance.dim())
                throw BanditError(ErrorCode::ConfigError, "lowerbound sequence needs theta_prime of length d");
            auto pair = std::make_shared<LowerBoundPair>();
            pair->theta = instance.theta();
            pair->theta_prime = Eigen::Map<const Vector>(s.theta_prime.data(), static_cast<Eigen::Index>(s.theta_prime.size()));
            pair->x_star = instance.optimal_index();
            pair->x_prime = s.x_prime;
            pair->gamma = s.gamma;
            pair->horizon = horizon;
            pair->intervals = lowerbound_intervals(instance.delta_min(), s.gamma, horizon);
            if (s.switch_interval < 1 || s.switch_interval > pair->intervals.size())
                throw BanditError(ErrorCode::ConfigError, "switch_interval out of range");
            pair->switch_interval = s.switch_interval;
            if ((instance.actions().matrix() * pair->theta_prime).cwiseAbs().maxCoeff() > 1.0)
                throw BanditError(ErrorCode::AdmissibilityViolation, "theta_prime pushes a mean outside [-1, 1]");
            return Environment::adversarial(instance, spec.noise, AdversarialSequence::lowerbound(std::move(pair)));
        }
        throw BanditError(ErrorCode::ConfigError, "unknown sequence kind '" + s.kind + "'");
    }
    throw BanditError(ErrorCode::ConfigError, "unknown environment type '" + spec.type + "'");
}

RunOutput run_once(const AlgorithmSpec& spec, std::shared_ptr<const Environment> env, std::uint64_t horizon,
                   std::uint64_t seed) {
    RunOutput out;
    out.environment = env;
    const ActionSet& actions = env->actions();
    std::unique_ptr<Learner> learner;
    if (spec.name == "reolb") {
        out.reolb = std::make_unique<Reolb>(actions, ReolbConfig{spec.delta, spec.scale()});
        learner = std::make_unique<ReolbLearner>(out.reolb.get());
    } else if (spec.name == "botw") {
        if (spec.blackbox != "ghp") throw BanditError(ErrorCode::ConfigError, "unknown black box '" + spec.blackbox + "'");
        BotwConfig cfg;
        cfg.delta = spec.delta;
        cfg.constant_scale = spec.scale();
        cfg.horizon = std::max<std::uint64_t>(horizon, 2);
        cfg.blackbox = resolve_blackbox(spec, actions, cfg.horizon);
        out.botw = std::make_unique<Botw>(actions, cfg);
        learner = std::make_unique<BotwLearner>(out.botw.get());
    } else if (spec.name == "ghp") {
        out.ghp = std::make_unique<GeometricHedge>(actions, resolve_blackbox(spec, actions, std::max<std::uint64_t>(horizon, 2)));
        learner = std::make_unique<GhpLearner>(out.ghp.get());
    } else {
        throw BanditError(ErrorCode::ConfigError, "unknown algorithm '" + spec.name + "'");
    }

    const BanditInstance& inst = env->instance();
    AdversarialRegretTracker adv(actions);
    out.trace.records.reserve(horizon);
    double cum = 0.0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        RoundRecord r;
        r.t = t;
        r.arm = learner->choose(RngStream::uniform_at(seed, kAlgorithmStream, t));
        r.phase = learner->phase();
        r.block_or_epoch = learner->block();
        r.y = env->observe(seed, t, r.arm);
        learner->update(r.arm, r.y);
        r.pseudo_regret = inst.gap(r.arm);
        cum += r.pseudo_regret;
        r.pseudo_regret_cum = cum;
        r.adv_regret_cum = adv.add(r.arm, env->loss(t));
        out.trace.records.push_back(std::move(r));
    }
    return out;
}

Trace run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
    const BanditInstance inst = config.instance.build();
    const std::uint64_t horizon = config.horizons.front();
    auto env = std::make_shared<const Environment>(build_environment(inst, config.environments.front(), horizon));
    return run_once(config.algorithm, env, horizon, seed).trace;
}

double final_regret(const Trace& trace, bool adversarial) {
    if (trace.empty()) return 0.0;
    return adversarial ? trace.records.back().adv_regret_cum : trace.records.back().pseudo_regret_cum;
}

std::string trace_csv(const Trace& trace) {
    std::string out = "t,arm,y,phase,block_or_epoch,pseudo_regret_cum,adv_regret_cum\n";
    out.reserve(out.size() + trace.size() * 64);
    char buf[256];
    for (const auto& r : trace.records) {
        const int n = std::snprintf(buf, sizeof buf, "%" PRIu64 ",%zu,%.17g,%d,%" PRId64 ",%.17g,%.17g\n", r.t, r.arm,
                                    r.y, r.phase, r.block_or_epoch, r.pseudo_regret_cum, r.adv_regret_cum);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

void write_trace_csv(const Trace& trace, const fs::path& path) { write_file(path, trace_csv(trace)); }

Trace parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,arm,y,phase,block_or_epoch,pseudo_regret_cum,adv_regret_cum")
        throw BanditError(ErrorCode::IoError, "unexpected trace header");
    Trace trace;
    double prev = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RoundRecord r;
        unsigned long long t = 0;
        std::size_t arm = 0;
        long long block = 0;
        if (std::sscanf(line.c_str(), "%llu,%zu,%lf,%d,%lld,%lf,%lf", &t, &arm, &r.y, &r.phase, &block,
                        &r.pseudo_regret_cum, &r.adv_regret_cum) != 7)
            throw BanditError(ErrorCode::IoError, "malformed trace row: " + line);
        r.t = t;
        r.arm = arm;
        r.block_or_epoch = block;
        r.pseudo_regret = r.pseudo_regret_cum - prev;
        prev = r.pseudo_regret_cum;
        trace.records.push_back(std::move(r));
    }
    return trace;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw BanditError(ErrorCode::EmptySamples, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SummaryRow summarise(const std::string& algorithm, const std::string& env, std::uint64_t horizon,
                     const std::vector<double>& regrets) {
    SummaryRow row;
    row.algorithm = algorithm;
    row.env = env;
    row.horizon = horizon;
    row.seed_count = regrets.size();
    row.median = quantile(regrets, 0.5);
    row.q10 = quantile(regrets, 0.1);
    row.q90 = quantile(regrets, 0.9);
    return row;
}

std::string summary_header() { return "algorithm,env,T,seed_count,regret_median,regret_q10,regret_q90\n"; }

std::string summary_line(const SummaryRow& row) {
    return fmt("%s,%s,%" PRIu64 ",%zu,%.17g,%.17g,%.17g\n", row.algorithm.c_str(), row.env.c_str(), row.horizon,
               row.seed_count, row.median, row.q10, row.q90);
}

RegretCurve regret_curve(const std::string& label, const std::vector<const Trace*>& traces, bool adversarial) {
    RegretCurve c;
    c.label = label;
    if (traces.empty() || traces.front()->empty()) return c;
    const std::uint64_t horizon = traces.front()->size();
    for (auto t : curve_points(horizon)) {
        std::vector<double> vals;
        for (const Trace* tr : traces) {
            const auto& r = tr->records.at(t - 1);
            vals.push_back(adversarial ? r.adv_regret_cum : r.pseudo_regret_cum);
        }
        c.t.push_back(t);
        c.median.push_back(quantile(vals, 0.5));
        c.q10.push_back(quantile(vals, 0.1));
        c.q90.push_back(quantile(vals, 0.9));
    }
    return c;
}

std::string regret_svg(const std::vector<RegretCurve>& curves) {
    const double width = 800, height = 500, left = 70, right = 20, top = 20, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    double t_max = 10.0, y_max = 1.0, y_min = 0.0;
    for (const auto& c : curves) {
        for (auto t : c.t) t_max = std::max(t_max, static_cast<double>(t));
        for (double v : c.q90) y_max = std::max(y_max, v);
        for (double v : c.q10) y_min = std::min(y_min, v);
    }
    const double lx_max = std::log10(t_max);
    auto px = [&](double t) { return left + pw * std::log10(std::max(t, 1.0)) / lx_max; };
    auto py = [&](double v) { return top + ph * (1.0 - (v - y_min) / (y_max - y_min)); };
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    std::string s = fmt("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                        width, height, width, height);
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, top + ph, left + pw, top + ph);
    s += fmt("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, top, left, top + ph);
    for (int k = 0; k <= static_cast<int>(std::floor(lx_max)); ++k) {
        const double x = px(std::pow(10.0, k));
        s += fmt("<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"black\"/>\n", x, top + ph, x, top + ph + 5);
        s += fmt("<text x=\"%.2f\" y=\"%g\" font-size=\"11\" text-anchor=\"middle\">1e%d</text>\n", x, top + ph + 18, k);
    }
    for (int k = 0; k <= 4; ++k) {
        const double v = y_min + (y_max - y_min) * k / 4.0;
        s += fmt("<text x=\"%g\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n", left - 6, py(v) + 4, v);
    }
    s += fmt("<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">round t (log scale)</text>\n",
             left + pw / 2, height - 10);
    s += fmt("<text x=\"15\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 %g)\">"
             "cumulative regret</text>\n",
             top + ph / 2, top + ph / 2);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* col = colours[i % (sizeof colours / sizeof *colours)];
        if (c.t.empty()) continue;
        std::string band;
        for (std::size_t k = 0; k < c.t.size(); ++k) band += fmt("%.2f,%.2f ", px(static_cast<double>(c.t[k])), py(c.q90[k]));
        for (std::size_t k = c.t.size(); k-- > 0;) band += fmt("%.2f,%.2f ", px(static_cast<double>(c.t[k])), py(c.q10[k]));
        s += fmt("<polygon points=\"%s\" fill=\"%s\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", band.c_str(), col);
        std::string line;
        for (std::size_t k = 0; k < c.t.size(); ++k) line += fmt("%.2f,%.2f ", px(static_cast<double>(c.t[k])), py(c.median[k]));
        s += fmt("<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\"/>\n", line.c_str(), col);
        s += fmt("<text x=\"%g\" y=\"%g\" font-size=\"11\" fill=\"%s\">%s</text>\n", left + 10,
                 top + 14 + 14 * static_cast<double>(i), col, xml_escape(c.label).c_str());
    }
    s += "</svg>\n";
    return s;
}

SweepResult sweep(const ExperimentConfig& config, unsigned jobs) {
    const BanditInstance inst = config.instance.build();
    struct Group {
        std::size_t env;
        std::uint64_t horizon;
        std::shared_ptr<const Environment> environment;
    };
    std::vector<Group> groups;
    for (std::size_t e = 0; e < config.environments.size(); ++e)
        for (auto h : config.horizons)
            groups.push_back({e, h, std::make_shared<const Environment>(build_environment(inst, config.environments[e], h))});
    const std::size_t per_group = config.seeds.size();
    const std::size_t total = groups.size() * per_group;

    std::vector<std::optional<Trace>> results(total);
    std::vector<std::exception_ptr> errors(total);
    std::vector<char> done(total, 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total || abort.load()) return;
            const Group& g = groups[i / per_group];
            std::optional<Trace> trace;
            std::exception_ptr err;
            try {
                trace = run_once(config.algorithm, g.environment, g.horizon, config.seeds[i % per_group]).trace;
            } catch (...) {
                err = std::current_exception();
            }
            {
                std::lock_guard<std::mutex> lock(mu);
                results[i] = std::move(trace);
                errors[i] = err;
                done[i] = 1;
            }
            cv.notify_all();
        }
    };
    const unsigned n_workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_workers; ++k) pool.emplace_back(worker);

    SweepResult out;
    const fs::path dir = config.output_dir;
    std::exception_ptr failure;
    try {
        fs::create_directories(dir);
        std::ofstream summary(dir / "summary.csv", std::ios::binary);
        if (!summary) throw BanditError(ErrorCode::IoError, "cannot write " + (dir / "summary.csv").string());
        summary << summary_header() << std::flush;

        std::vector<RegretCurve> curves;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            const Group& g = groups[gi];
            const auto& env_spec = config.environments[g.env];
            const bool adversarial = g.environment->is_adversarial();
            std::vector<double> finals;
            std::vector<std::uint64_t> pts = curve_points(std::max<std::uint64_t>(g.horizon, 1));
            std::vector<std::vector<double>> sampled(pts.size());
            for (std::size_t k = 0; k < per_group; ++k) {
                const std::size_t i = gi * per_group + k;
                std::optional<Trace> trace;
                {
                    std::unique_lock<std::mutex> lock(mu);
                    cv.wait(lock, [&] { return done[i] != 0; });
                    if (errors[i]) std::rethrow_exception(errors[i]);
                    trace = std::move(results[i]);
                    results[i].reset();
                }
                if (config.write_traces) {
                    const fs::path p = dir / "traces" /
                                       fmt("trace_%s_%s_T%" PRIu64 "_seed%" PRIu64 ".csv", sanitise(config.algorithm.name).c_str(),
                                           sanitise(env_spec.name).c_str(), g.horizon, config.seeds[k]);
                    write_trace_csv(*trace, p);
                    out.traces.push_back(p);
                }
                finals.push_back(final_regret(*trace, adversarial));
                for (std::size_t q = 0; q < pts.size() && !trace->empty(); ++q) {
                    const auto& r = trace->records.at(pts[q] - 1);
                    sampled[q].push_back(adversarial ? r.adv_regret_cum : r.pseudo_regret_cum);
                }
            }
            const SummaryRow row = summarise(config.algorithm.name, env_spec.name, g.horizon, finals);
            summary << summary_line(row) << std::flush;
            out.rows.push_back(row);
            if (config.svg) {
                RegretCurve c;
                c.label = fmt("%s %s T=%" PRIu64, config.algorithm.name.c_str(), env_spec.name.c_str(), g.horizon);
                for (std::size_t q = 0; q < pts.size() && !sampled[q].empty(); ++q) {
                    c.t.push_back(pts[q]);
                    c.median.push_back(quantile(sampled[q], 0.5));
                    c.q10.push_back(quantile(sampled[q], 0.1));
                    c.q90.push_back(quantile(sampled[q], 0.9));
                }
                curves.push_back(std::move(c));
            }
        }
        if (config.svg) write_file(dir / "regret.svg", regret_svg(curves));
    } catch (...) {
        failure = std::current_exception();
        abort.store(true);
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

LowerBoundReport lowerbound_report(const BanditInstance& instance, double gamma, std::uint64_t horizon, int runs,
                                   const AlgorithmSpec& spec, std::optional<double> c_reg, std::uint64_t first_seed) {
    if (runs < 1) throw BanditError(ErrorCode::DomainError, "at least one run is required");
    LowerBoundReport rep;
    rep.gamma = gamma;
    rep.horizon = horizon;
    rep.runs = runs;
    rep.intervals = lowerbound_intervals(instance.delta_min(), gamma, horizon);
    rep.c_reg = c_reg.value_or(gamma / 256.0);
    rep.V = rep.c_reg * std::log(static_cast<double>(horizon));

    const auto n = instance.size();
    const auto d = static_cast<Eigen::Index>(instance.dim());
    const std::size_t s = rep.intervals.size();
    std::vector<Matrix> g(s, Matrix::Zero(d, d));
    std::vector<std::vector<double>> counts(s, std::vector<double>(n, 0.0));
    std::vector<std::size_t> interval_of(horizon + 1, 0);
    {
        std::uint64_t t = 1;
        for (std::size_t i = 0; i < s; ++i)
            for (std::uint64_t k = 0; k < rep.intervals[i]; ++k) interval_of[t++] = i;
    }
    auto env = std::make_shared<const Environment>(Environment::stochastic(instance, NoiseModel::Bernoulli));
    const Matrix& x = instance.actions().matrix();
    for (int r = 0; r < runs; ++r) {
        const auto run = run_once(spec, env, horizon, first_seed + static_cast<std::uint64_t>(r));
        for (const auto& rec : run.trace.records) {
            const std::size_t i = interval_of[rec.t];
            const auto row = x.row(static_cast<Eigen::Index>(rec.arm));
            g[i].noalias() += row.transpose() * row;
            counts[i][rec.arm] += 1.0;
        }
    }
    for (std::size_t i = 0; i < s; ++i) {
        g[i] /= static_cast<double>(runs);
        for (auto& c : counts[i]) c /= static_cast<double>(runs);
    }

    const std::size_t star = instance.optimal_index();
    const Vector x_star = instance.actions().arm(star);
    double best = -1.0;
    std::size_t best_i = 0, best_x = 0;
    bool found = false;
    for (std::size_t i = 0; i < s && !found; ++i) {
        Eigen::LLT<Matrix> llt(g[i]);
        if (llt.info() != Eigen::Success) continue;
        double interval_best = -1.0;
        std::size_t interval_x = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (a == star) continue;
            const Vector diff = instance.actions().arm(a) - x_star;
            const double gap = instance.gap(a);
            const double ratio = diff.dot(llt.solve(diff)) / (gap * gap / (8.0 * rep.V));
            if (ratio > interval_best) {
                interval_best = ratio;
                interval_x = a;
            }
        }
        if (interval_best > best) {
            best = interval_best;
            best_i = i;
            best_x = interval_x;
        }
        if (interval_best >= 1.0) {
            found = true;
            best = interval_best;
            best_i = i;
            best_x = interval_x;
        }
    }
    if (best < 0.0) throw BanditError(ErrorCode::NotPD, "no interval has a positive definite G_i");
    rep.selection_holds = found;
    rep.selection_ratio = best;
    rep.switch_interval = best_i + 1;
    rep.x_prime = best_x;
    rep.g_i = g[best_i];
    rep.counts = counts[best_i];

    const LowerBoundPair pair =
        make_lowerbound_pair(instance, gamma, horizon, DesignMatrix(rep.g_i), best_x, rep.switch_interval, rep.c_reg);
    rep.theta_prime = pair.theta_prime;
    rep.flip_residual = (instance.actions().arm(best_x) - x_star).dot(pair.theta_prime) + instance.gap(best_x);
    rep.kl = trajectory_kl(rep.counts, instance.actions(), instance.theta(), pair.theta_prime);
    rep.kl_bound = 64.0 * rep.V;
    return rep;
}

std::string lowerbound_csv(const LowerBoundReport& r) {
    auto join_u = [](const std::vector<std::uint64_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
        return s;
    };
    auto join_d = [](const auto& v, std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s += (i ? ";" : "") + num(v[i]);
        return s;
    };
    std::string s = "metric,value\n";
    s += "gamma," + num(r.gamma) + "\n";
    s += "T," + std::to_string(r.horizon) + "\n";
    s += "runs," + std::to_string(r.runs) + "\n";
    s += "intervals," + join_u(r.intervals) + "\n";
    s += "switch_interval," + std::to_string(r.switch_interval) + "\n";
    s += "x_prime," + std::to_string(r.x_prime) + "\n";
    s += "selection_holds," + std::string(r.selection_holds ? "1" : "0") + "\n";
    s += "selection_ratio," + num(r.selection_ratio) + "\n";
    s += "c_reg," + num(r.c_reg) + "\n";
    s += "V," + num(r.V) + "\n";
    s += "theta_prime," + join_d(r.theta_prime, static_cast<std::size_t>(r.theta_prime.size())) + "\n";
    s += "flip_residual," + num(r.flip_residual) + "\n";
    s += "pull_counts," + join_d(r.counts, r.counts.size()) + "\n";
    s += "kl," + num(r.kl) + "\n";
    s += "kl_bound," + num(r.kl_bound) + "\n";
    s += "kl_within_bound," + std::string(r.kl <= r.kl_bound ? "1" : "0") + "\n";
    return s;
}

std::string design_csv(const BanditInstance& instance, const std::string& what, std::uint64_t t, double delta,
                       double scale) {
    const auto n = instance.size();
    const double d = static_cast<double>(instance.dim());
    std::string s = "arm,weight,quad_norm,bound\n";
    auto norms = [&](const std::vector<double>& w) {
        Eigen::LLT<Matrix> llt(gram(w, instance.actions()).matrix());
        std::vector<double> out(n, std::numeric_limits<double>::infinity());
        if (llt.info() == Eigen::Success)
            for (std::size_t i = 0; i < n; ++i) out[i] = instance.actions().arm(i).dot(llt.solve(instance.actions().arm(i)));
        return out;
    };
    if (t < 1) throw BanditError(ErrorCode::ConfigError, "--t must be at least 1");
    if (what == "op") {
        const double beta = beta_t(t, n, delta, scale);
        const auto sol = solve_op(t, instance.gaps(), instance.actions(), beta);
        const auto q = norms(sol.p.weights());
        const auto b = op_bounds(t, instance.gaps(), instance.dim(), beta);
        for (std::size_t i = 0; i < n; ++i) s += fmt("%zu,%.17g,%.17g,%.17g\n", i, sol.p[i], q[i], b[i]);
        s += "\nmetric,value\n";
        s += "objective," + num(sol.objective) + "\n";
        s += "construction_objective," + num(sol.construction_objective) + "\n";
        s += "objective_bound," + num((d * beta + 1.0) / std::sqrt(static_cast<double>(t))) + "\n";
        s += "beta," + num(beta) + "\n";
        s += "max_violation," + num(sol.max_violation) + "\n";
        s += "refined," + std::string(sol.refined ? "1" : "0") + "\n";
    } else if (what == "c") {
        const auto c = instance_constant_c(instance);
        const auto q = norms(c.weights.n);
        for (std::size_t i = 0; i < n; ++i) {
            const double b = i == instance.optimal_index() ? std::numeric_limits<double>::infinity()
                                                           : 0.5 * instance.gap(i) * instance.gap(i);
            s += fmt("%zu,%.17g,%.17g,%.17g\n", i, c.weights.n[i], q[i], b);
        }
        s += "\nmetric,value\n";
        s += "value," + num(c.value) + "\n";
        s += "construction_value," + num(c.construction_value) + "\n";
        s += "bound_48d_over_delta_min," + num(48.0 * d / instance.delta_min()) + "\n";
        s += "max_violation," + num(c.max_violation) + "\n";
    } else if (what == "expl") {
        const double kappa = std::min(1.0 / std::sqrt(static_cast<double>(t)), 0.5);
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        const auto p = exploration_design(all, instance.actions(), kappa);
        const auto q = norms(p.weights());
        for (std::size_t i = 0; i < n; ++i) s += fmt("%zu,%.17g,%.17g,%.17g\n", i, p[i], q[i], 2.0 * d);
        s += "\nmetric,value\n";
        s += "kappa," + num(kappa) + "\n";
        s += "max_quad_norm," + num(*std::max_element(q.begin(), q.end())) + "\n";
    } else {
        throw BanditError(ErrorCode::ConfigError, "--what must be op, c or expl");
    }
    return s;
}

}  // namespace banditlab
