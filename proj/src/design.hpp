#pragma once

#include "core.hpp"
#include "linalg.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace banditlab {

/// Unnormalised per-arm allocation N_x >= 0.
struct DesignWeights {
    std::vector<double> n;
};

struct DesignConfig {
    int max_iterations = 5000;
    double gap_tol = 1e-7;
};

/// Result of the OP program. `construction_objective` is the value of the
/// certified two-stage construction; `objective` is the value of the returned
/// (refined) distribution and never exceeds it.
struct OpSolution {
    ArmDistribution p;
    double objective = 0.0;
    double construction_objective = 0.0;
    double max_violation = 0.0;  // max_x (||x||^2 - bound_x) / bound_x
    int iterations = 0;
    double beta = 0.0;
    bool refined = false;
    int fallback_halvings = 0;
};

struct FeasibilityReport {
    std::vector<double> slack;  // bound_x - ||x||^2_{S(p)^{-1}}; -inf when x leaves the range of S(p)
    double max_violation = 0.0;
    bool feasible = false;
};

/// scale * 2^15 * ln(t |X| / delta)
double beta_t(std::uint64_t t, std::size_t n_arms, double delta, double scale = 1.0);

/// kappa * uniform(X) + (1 - kappa) * q, with q on `subset` maximising
/// log det of the mixture's design matrix. Every x in the subset ends with
/// ||x||^2_{S^{-1}} <= 2d.
ArmDistribution exploration_design(std::span<const std::size_t> subset, const ActionSet& actions, double kappa,
                                   const DesignConfig& config = {});

/// Constraint right-hand side t * gap^2 / beta + 4d for every arm.
std::vector<double> op_bounds(std::uint64_t t, std::span<const double> gap_estimates, std::size_t dim, double beta);

FeasibilityReport op_feasibility_check(const ArmDistribution& p, std::uint64_t t, std::span<const double> gap_estimates,
                                       double beta, const ActionSet& actions, double rel_tol = 1e-6);

/// Minimiser of sum_x p_x gap_x subject to ||x||^2_{S(p)^{-1}} <= t gap_x^2 / beta + 4d.
/// `refine = false` returns the certified construction without the barrier polish.
OpSolution solve_op(std::uint64_t t, std::span<const double> gap_estimates, const ActionSet& actions, double beta,
                    double tol = 1e-7, bool refine = true);

struct InstanceConstant {
    double value = 0.0;
    DesignWeights weights;
    double construction_value = 0.0;  // group construction, always <= 48 d / delta_min
    double max_violation = 0.0;
};

/// Group construction N for the instance constant (finite cap on the optimal arm).
DesignWeights instance_constant_construction(const BanditInstance& instance);

/// Approximately optimal value of the instance lower-bound program
/// inf sum_{x != x*} N_x gap_x s.t. ||x||^2_{H(N)^{-1}} <= gap_x^2 / 2.
InstanceConstant instance_constant_c(const BanditInstance& instance, double tol = 0.02);

/// sum_{x != x*} 2 / gap_x. Needs exactly one zero gap.
double orthonormal_oracle(std::span<const double> gaps);
/// Same, after checking that the instance's arms are orthonormal.
double orthonormal_oracle(const BanditInstance& instance);

/// Largest ||x||^2_{S(p)^{-1}} over `subset`.
double max_quad_norm(const ArmDistribution& p, std::span<const std::size_t> subset, const ActionSet& actions);

}  // namespace banditlab
