#pragma once

#include "core.hpp"
#include "linalg.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace banditlab {

inline constexpr std::uint64_t kEnvironmentStream = 1;
inline constexpr std::uint64_t kAlgorithmStream = 2;

enum class NoiseModel { Bernoulli, UniformBounded };

NoiseModel parse_noise_model(const std::string& name);
const char* noise_model_name(NoiseModel model);

/// One observation with the given mean from a single uniform u in [0, 1).
/// Bernoulli: +1 with probability (1 + mean) / 2, else -1.
/// UniformBounded: mean + U[-(1 - |mean|), 1 - |mean|].
double draw_observation(double mean, NoiseModel model, double u);

/// Oblivious corruption c_t, a pure function of t. Every generator spends
/// its budget along a fixed direction v with per-round cost
/// max_x |<x, v>|, at full strength until the budget runs out.
class CorruptionSchedule {
public:
    enum class Kind { None, FrontLoaded, Periodic, TargetOptimal };

    static CorruptionSchedule none(std::size_t dim);
    /// v = -2 theta: flips every mean while the budget lasts.
    static CorruptionSchedule front_loaded(const BanditInstance& instance, double budget);
    /// Same direction, applied only on rounds t = 0 mod period.
    static CorruptionSchedule periodic(const BanditInstance& instance, double budget, std::uint64_t period);
    /// v = delta_min * x* / ||x*||^2: raises the optimal arm's mean by delta_min.
    static CorruptionSchedule target_optimal(const BanditInstance& instance, double budget);

    Kind kind() const noexcept { return kind_; }
    double budget() const noexcept { return budget_; }
    /// c_t for t >= 1.
    Vector at(std::uint64_t t) const;
    /// max_x |<x, c_t>|
    double amount(std::uint64_t t) const;

private:
    double fraction(std::uint64_t t) const;

    Kind kind_ = Kind::None;
    Vector direction_;
    double unit_cost_ = 0.0;
    double budget_ = 0.0;
    std::uint64_t period_ = 1;
};

struct CorruptionTotals {
    double total = 0.0;
    std::vector<double> per_block;
};

/// Per-block corruption over [1, T]; blocks start at the given rounds
/// (the first must be 1). total is the sum of the block values.
CorruptionTotals corruption_totals(const CorruptionSchedule& schedule, std::uint64_t horizon,
                                   std::span<const std::uint64_t> block_starts);

/// The pair of environments from the lower-bound construction.
struct LowerBoundPair {
    Vector theta;
    Vector theta_prime;
    std::size_t x_star = 0;
    std::size_t x_prime = 0;
    double gamma = 0.5;
    std::uint64_t horizon = 0;
    std::vector<std::uint64_t> intervals;  // lengths |I_1|, ..., |I_S|
    std::size_t switch_interval = 1;       // 1-based index i
    double c_reg = 0.0;
    double V = 0.0;
    double U = 0.0;

    /// First round of interval i (1-based rounds and intervals).
    std::uint64_t interval_start(std::size_t i) const;
    std::size_t interval_of(std::uint64_t t) const;
};

/// ceil((4 / delta_min)^{i-1} T^gamma) for i = 1, 2, ..., the last one
/// truncated so that the lengths sum to T. Throws DomainError when an
/// untruncated interval is shorter than (3 / delta_min) times the total
/// length before it.
std::vector<std::uint64_t> lowerbound_intervals(double delta_min, double gamma, std::uint64_t horizon);

/// theta' = theta - 2 gap_{x'} G^{-1}(x' - x*) / ||x' - x*||^2_{G^{-1}}.
/// Throws MeanOutOfRange when ||theta|| > 1/4 or some |<x, theta'>| > 3/4.
LowerBoundPair make_lowerbound_pair(const BanditInstance& instance, double gamma, std::uint64_t horizon,
                                    const DesignMatrix& g_i, std::size_t x_prime, std::size_t switch_interval,
                                    double c_reg);

/// KL divergence between the +-1 observations with means p and q.
double kl_bernoulli(double p, double q);

/// sum_x counts_x * kl(<x, theta>, <x, theta'>)
double trajectory_kl(std::span<const double> counts, const ActionSet& actions, const Vector& theta,
                     const Vector& theta_prime);

/// Oblivious loss sequence l_t.
class AdversarialSequence {
public:
    enum class Kind { Switch, Sinusoid, LowerBound };

    /// theta for t < switch_round, -theta afterwards.
    static AdversarialSequence switching(const Vector& theta, std::uint64_t switch_round);
    /// theta + a sin(2 pi t / period) u. Throws AdmissibilityViolation when
    /// some |<x, l_t>| could exceed 1.
    static AdversarialSequence sinusoid(const BanditInstance& instance, const Vector& direction, double amplitude,
                                        std::uint64_t period);
    static AdversarialSequence lowerbound(std::shared_ptr<const LowerBoundPair> pair);

    Kind kind() const noexcept { return kind_; }
    Vector at(std::uint64_t t) const;

private:
    Kind kind_ = Kind::Switch;
    Vector theta_;
    Vector direction_;
    double amplitude_ = 0.0;
    std::uint64_t period_ = 1;
    std::shared_ptr<const LowerBoundPair> pair_;
};

/// A loss environment over a base instance. Observations at (seed, t) are a
/// pure function of (seed, t, arm); the noise draw uses one uniform from
/// the environment stream at counter t.
class Environment {
public:
    static Environment stochastic(BanditInstance instance, NoiseModel noise);
    static Environment corrupted(BanditInstance instance, NoiseModel noise, CorruptionSchedule schedule);
    static Environment adversarial(BanditInstance instance, NoiseModel noise, AdversarialSequence sequence);

    const BanditInstance& instance() const noexcept { return instance_; }
    const ActionSet& actions() const noexcept { return instance_.actions(); }
    NoiseModel noise() const noexcept { return noise_; }
    bool is_adversarial() const noexcept { return sequence_ != nullptr; }
    const CorruptionSchedule* corruption() const noexcept { return corruption_.get(); }

    /// l_t (theta + c_t in the corrupted case).
    Vector loss(std::uint64_t t) const;
    double mean(std::uint64_t t, std::size_t arm) const;
    double observe(std::uint64_t seed, std::uint64_t t, std::size_t arm) const;

private:
    Environment(BanditInstance instance, NoiseModel noise) : instance_(std::move(instance)), noise_(noise) {}

    BanditInstance instance_;
    NoiseModel noise_;
    std::shared_ptr<const CorruptionSchedule> corruption_;
    std::shared_ptr<const AdversarialSequence> sequence_;
};

}  // namespace banditlab
