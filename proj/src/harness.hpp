#pragma once

#include "botw.hpp"
#include "core.hpp"
#include "environments.hpp"
#include "ghp.hpp"
#include "reolb.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace banditlab {

enum class Preset { Paper, Demo };

struct AlgorithmSpec {
    std::string name = "reolb";  // reolb | botw | ghp
    std::string blackbox = "ghp";
    Preset preset = Preset::Paper;
    double delta = 0.1;
    std::optional<double> constant_scale;
    std::optional<double> c1;
    std::optional<double> c2;
    std::optional<double> l0;

    double scale() const;
};

/// Black-box constants for a run of length T on the given arm set, after
/// presets and explicit overrides.
GhpParams resolve_blackbox(const AlgorithmSpec& spec, const ActionSet& actions, std::uint64_t horizon);

struct CorruptionSpec {
    std::string kind = "none";  // none | front_loaded | periodic | target_optimal
    std::optional<double> budget;
    std::optional<double> budget_fraction;  // budget = fraction * T
    std::uint64_t period = 1;
};

struct SequenceSpec {
    std::string kind = "switch";  // switch | sinusoid | lowerbound
    double at_fraction = 0.5;
    double amplitude = 0.0;
    std::uint64_t period = 1;
    std::vector<double> direction;
    double gamma = 0.5;
    std::size_t switch_interval = 1;
    std::size_t x_prime = 0;
    std::vector<double> theta_prime;
};

struct EnvironmentSpec {
    std::string name;
    std::string type = "stochastic";  // stochastic | corrupted | adversarial
    NoiseModel noise = NoiseModel::Bernoulli;
    CorruptionSpec corruption;
    SequenceSpec sequence;
};

struct InstanceSpec {
    std::vector<std::vector<double>> actions;
    std::vector<double> theta;
    std::optional<EnvironmentSpec> environment;

    BanditInstance build() const;
};

struct ExperimentConfig {
    int version = 1;
    AlgorithmSpec algorithm;
    InstanceSpec instance;
    std::vector<EnvironmentSpec> environments;
    std::vector<std::uint64_t> horizons;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir = "out";
    bool svg = true;
    bool write_traces = true;
};

/// Parses the JSON config. Relative instance_file paths resolve against
/// base_dir. Throws ConfigError / IoError.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);
/// {"d": ..., "actions": [[...]], "theta": [...], "environment": {...}}
InstanceSpec parse_instance(const std::string& text);
InstanceSpec load_instance(const std::filesystem::path& path);

Environment build_environment(const BanditInstance& instance, const EnvironmentSpec& spec, std::uint64_t horizon);

struct RunOutput {
    Trace trace;
    std::shared_ptr<const Environment> environment;
    std::unique_ptr<Reolb> reolb;
    std::unique_ptr<Botw> botw;
    std::unique_ptr<GeometricHedge> ghp;
};

/// One seeded run of T rounds. Noise and sampling draw from separate
/// counter-based streams, so the trace depends only on (inputs, seed).
RunOutput run_once(const AlgorithmSpec& spec, std::shared_ptr<const Environment> env, std::uint64_t horizon,
                   std::uint64_t seed);

/// First environment and first horizon of the config.
Trace run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Regret used in summaries: adversarial regret for adversarial
/// environments, pseudo-regret otherwise.
double final_regret(const Trace& trace, bool adversarial);

std::string trace_csv(const Trace& trace);
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);
Trace parse_trace_csv(const std::string& text);

/// Type-7 sample quantile.
double quantile(std::vector<double> values, double q);

struct SummaryRow {
    std::string algorithm;
    std::string env;
    std::uint64_t horizon = 0;
    std::size_t seed_count = 0;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
};

SummaryRow summarise(const std::string& algorithm, const std::string& env, std::uint64_t horizon,
                     const std::vector<double>& regrets);
std::string summary_header();
std::string summary_line(const SummaryRow& row);

/// Median cumulative regret over seeds with a q10-q90 band against t,
/// log-scaled x axis. One curve per (env, T) group.
struct RegretCurve {
    std::string label;
    std::vector<std::uint64_t> t;
    std::vector<double> median;
    std::vector<double> q10;
    std::vector<double> q90;
};
RegretCurve regret_curve(const std::string& label, const std::vector<const Trace*>& traces, bool adversarial);
std::string regret_svg(const std::vector<RegretCurve>& curves);

struct SweepResult {
    std::vector<SummaryRow> rows;
    std::vector<std::filesystem::path> traces;
};

/// Seeds x horizons x environments, run on `jobs` worker threads. A single
/// collector writes trace files and summary rows in canonical order and
/// flushes after every row, so an interrupted sweep leaves a valid prefix.
SweepResult sweep(const ExperimentConfig& config, unsigned jobs);

struct LowerBoundReport {
    double gamma = 0.0;
    std::uint64_t horizon = 0;
    int runs = 0;
    std::vector<std::uint64_t> intervals;
    std::size_t switch_interval = 0;
    std::size_t x_prime = 0;
    bool selection_holds = false;  // ||x' - x*||^2_{G_i^{-1}} >= gap^2 / (8V)
    double selection_ratio = 0.0;
    double c_reg = 0.0;
    double V = 0.0;
    Vector theta_prime;
    double flip_residual = 0.0;  // <x' - x*, theta'> + gap_{x'}
    std::vector<double> counts;  // E[T_i(x)]
    Matrix g_i;
    double kl = 0.0;
    double kl_bound = 0.0;  // 64 V
};

/// Measures G_i and E[T_i(x)] over `runs` seeded runs of `spec` on the
/// stochastic Bernoulli instance, picks the first interval and arm passing
/// the selection test, builds theta' and evaluates the trajectory KL.
LowerBoundReport lowerbound_report(const BanditInstance& instance, double gamma, std::uint64_t horizon, int runs,
                                   const AlgorithmSpec& spec, std::optional<double> c_reg = std::nullopt,
                                   std::uint64_t first_seed = 1);
std::string lowerbound_csv(const LowerBoundReport& report);

/// `what` is op, c or expl. CSV with one row per arm then metric rows.
std::string design_csv(const BanditInstance& instance, const std::string& what, std::uint64_t t, double delta,
                       double scale);

}  // namespace banditlab
