#include "design.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace banditlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min_q  cost . q - weight * ln det(base + scale * sum_i q_i x_i x_i^T)
// over the simplex on `support`, by pairwise Frank-Wolfe with exact line search.
struct LogDetProblem {
    const Matrix* arms = nullptr;
    std::vector<std::size_t> support;
    std::vector<double> cost;  // per arm, indexed like arms
    double weight = 1.0;
    Matrix base;
    double scale = 1.0;
};

struct LogDetResult {
    std::vector<double> q;  // per arm; zero outside the support
    int iterations = 0;
    double gap = kInf;
};

Matrix weighted_gram(const Matrix& arms, const std::vector<double>& w, const Matrix& base, double scale) {
    Matrix m = base;
    for (Eigen::Index i = 0; i < arms.rows(); ++i) {
        const double wi = w[static_cast<std::size_t>(i)];
        if (wi != 0.0) m.noalias() += (scale * wi) * arms.row(i).transpose() * arms.row(i);
    }
    return 0.5 * (m + m.transpose());
}

LogDetResult minimise_logdet(const LogDetProblem& prob, std::vector<double> q, double gap_tol, int max_iterations) {
    const Matrix& x = *prob.arms;
    LogDetResult out;
    for (int iter = 0;; ++iter) {
        const Matrix m = weighted_gram(x, q, prob.base, prob.scale);
        Eigen::LLT<Matrix> llt(m);
        if (llt.info() != Eigen::Success) throw BanditError(ErrorCode::NotPD, "design matrix lost rank during Frank-Wolfe");

        std::size_t toward = prob.support.front();
        std::size_t away = prob.support.front();
        double g_toward = kInf;
        double g_away = -kInf;
        double weighted_grad = 0.0;
        for (auto i : prob.support) {
            const Vector xi = x.row(static_cast<Eigen::Index>(i)).transpose();
            const double norm = xi.dot(llt.solve(xi));
            const double g = prob.cost[i] - prob.weight * prob.scale * norm;
            weighted_grad += q[i] * g;
            if (g < g_toward) {
                g_toward = g;
                toward = i;
            }
            if (q[i] > 0.0 && g > g_away) {
                g_away = g;
                away = i;
            }
        }
        out.gap = weighted_grad - g_toward;
        out.iterations = iter;
        if (out.gap <= gap_tol || iter >= max_iterations || toward == away) break;

        const Vector u = x.row(static_cast<Eigen::Index>(toward)).transpose();
        const Vector v = x.row(static_cast<Eigen::Index>(away)).transpose();
        const Vector mu = llt.solve(u);
        const Vector mv = llt.solve(v);
        const double a = u.dot(mu);
        const double c = v.dot(mv);
        const double b = u.dot(mv);
        const double s = prob.scale;
        const double dcost = prob.cost[toward] - prob.cost[away];
        // det(M(g)) / det(M) = 1 + g s (a - c) + g^2 s^2 (b^2 - a c)
        auto slope = [&](double g) {
            const double det = 1.0 + g * s * (a - c) + g * g * s * s * (b * b - a * c);
            if (det <= 0.0) return kInf;
            const double ddet = s * (a - c) + 2.0 * g * s * s * (b * b - a * c);
            return dcost - prob.weight * ddet / det;
        };
        const double g_max = q[away];
        double step = g_max;
        if (slope(g_max) > 0.0) {
            double lo = 0.0;
            double hi = g_max;
            for (int k = 0; k < 100 && hi - lo > 1e-17; ++k) {
                const double mid = 0.5 * (lo + hi);
                if (slope(mid) > 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            step = lo;
        }
        if (step <= 0.0) break;
        q[toward] += step;
        q[away] = (step == g_max) ? 0.0 : q[away] - step;
    }
    out.q = std::move(q);
    return out;
}

// Log-barrier path following for
//   min cost . z  s.t.  x_j^T H(z)^{-1} x_j <= bound_j (j constrained),
//   0 <= z <= upper, optionally sum z = 1,
// with H(z) = base + sum_i z_i x_i x_i^T.
struct BarrierProblem {
    const Matrix* arms = nullptr;
    Matrix base;
    std::vector<double> cost;
    std::vector<std::size_t> constrained;
    std::vector<double> bound;
    std::vector<double> upper;
    bool simplex = false;
    double rel_gap = 1e-6;
    double abs_gap = 1e-12;
};

struct BarrierState {
    bool feasible = false;
    double value = kInf;  // tau * cost.z + barrier
    Vector grad;
    Matrix hess;
};

class BarrierSolver {
public:
    explicit BarrierSolver(const BarrierProblem& prob) : p_(prob), n_(prob.arms->rows()) {}

    std::vector<double> solve(std::vector<double> z0, int* newton_steps) {
        Vector z = Eigen::Map<const Vector>(z0.data(), n_);
        if (!evaluate(z, 1.0, false).feasible) throw BanditError(ErrorCode::DomainError, "barrier start is not strictly feasible");
        double m = static_cast<double>(p_.constrained.size()) + static_cast<double>(n_);
        for (double u : p_.upper)
            if (std::isfinite(u)) m += 1.0;
        const Vector c = Eigen::Map<const Vector>(p_.cost.data(), n_);
        const double obj0 = c.dot(z);
        if (c.cwiseAbs().maxCoeff() == 0.0) return z0;
        double tau = m / std::max(std::abs(obj0), 1e-12);
        int steps = 0;
        for (int outer = 0; outer < 60; ++outer) {
            steps += centre(z, tau);
            const double obj = c.dot(z);
            if (m / tau <= std::max(p_.rel_gap * std::abs(obj), p_.abs_gap)) break;
            tau *= 10.0;
        }
        if (newton_steps) *newton_steps = steps;
        return std::vector<double>(z.data(), z.data() + n_);
    }

private:
    int centre(Vector& z, double tau) {
        int steps = 0;
        for (; steps < 200; ++steps) {
            const BarrierState st = evaluate(z, tau, true);
            // Newton system in the variables z_i * u_i, which keeps the
            // 1/z^2 barrier curvature at unit scale.
            const Matrix hs = z.asDiagonal() * st.hess * z.asDiagonal();
            const Vector gs = z.cwiseProduct(st.grad);
            Vector dir;
            if (p_.simplex) {
                Matrix kkt = Matrix::Zero(n_ + 1, n_ + 1);
                kkt.topLeftCorner(n_, n_) = hs;
                kkt.block(0, n_, n_, 1) = z;
                kkt.block(n_, 0, 1, n_) = z.transpose();
                Vector rhs = Vector::Zero(n_ + 1);
                rhs.head(n_) = -gs;
                dir = z.cwiseProduct(kkt.fullPivLu().solve(rhs).head(n_));
                dir -= dir.sum() / z.sum() * z;
            } else {
                dir = z.cwiseProduct(hs.ldlt().solve(-gs));
            }
            if (!dir.allFinite()) break;
            const double decrement = -st.grad.dot(dir);
            if (decrement <= 2e-10) break;
            double step = 1.0;
            bool moved = false;
            for (int k = 0; k < 80; ++k, step *= 0.5) {
                const Vector trial = z + step * dir;
                const BarrierState ts = evaluate(trial, tau, false);
                if (ts.feasible && ts.value <= st.value - 0.25 * step * decrement) {
                    z = trial;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        return steps;
    }

    BarrierState evaluate(const Vector& z, double tau, bool derivatives) const {
        BarrierState st;
        for (Eigen::Index i = 0; i < n_; ++i) {
            if (!(z(i) > 0.0)) return st;
            if (z(i) >= p_.upper[static_cast<std::size_t>(i)]) return st;
        }
        const Matrix& x = *p_.arms;
        Matrix h = p_.base + x.transpose() * z.asDiagonal() * x;
        h = 0.5 * (h + h.transpose());
        Eigen::LLT<Matrix> llt(h);
        if (llt.info() != Eigen::Success) return st;
        const Matrix hinv_xt = llt.solve(x.transpose());
        const Matrix a = x * hinv_xt;

        const auto mc = static_cast<Eigen::Index>(p_.constrained.size());
        Vector slack(mc);
        for (Eigen::Index j = 0; j < mc; ++j) {
            const auto r = static_cast<Eigen::Index>(p_.constrained[static_cast<std::size_t>(j)]);
            slack(j) = p_.bound[static_cast<std::size_t>(j)] - a(r, r);
            if (!(slack(j) > 0.0)) return st;
        }
        const Vector c = Eigen::Map<const Vector>(p_.cost.data(), n_);
        double value = tau * c.dot(z) - slack.array().log().sum() - z.array().log().sum();
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double u = p_.upper[static_cast<std::size_t>(i)];
            if (std::isfinite(u)) value -= std::log(u - z(i));
        }
        st.feasible = std::isfinite(value);
        st.value = value;
        if (!derivatives || !st.feasible) return st;

        Matrix rows(mc, n_);
        for (Eigen::Index j = 0; j < mc; ++j)
            rows.row(j) = a.row(static_cast<Eigen::Index>(p_.constrained[static_cast<std::size_t>(j)]));
        const Matrix sq = rows.array().square().matrix();
        const Vector inv_s = slack.cwiseInverse();

        st.grad = tau * c - sq.transpose() * inv_s - z.cwiseInverse();
        st.hess = sq.transpose() * inv_s.array().square().matrix().asDiagonal() * sq;
        st.hess += 2.0 * a.cwiseProduct(rows.transpose() * inv_s.asDiagonal() * rows);
        st.hess.diagonal() += z.array().square().inverse().matrix();
        for (Eigen::Index i = 0; i < n_; ++i) {
            const double u = p_.upper[static_cast<std::size_t>(i)];
            if (!std::isfinite(u)) continue;
            st.grad(i) += 1.0 / (u - z(i));
            st.hess(i, i) += 1.0 / ((u - z(i)) * (u - z(i)));
        }
        st.hess = 0.5 * (st.hess + st.hess.transpose());
        return st;
    }

    const BarrierProblem& p_;
    Eigen::Index n_;
};

std::vector<std::size_t> checked_subset(std::span<const std::size_t> subset, std::size_t n) {
    if (subset.empty()) throw BanditError(ErrorCode::EmptySubset, "exploration subset is empty");
    std::set<std::size_t> uniq(subset.begin(), subset.end());
    if (*uniq.rbegin() >= n) throw BanditError(ErrorCode::DomainError, "subset index out of range");
    return {uniq.begin(), uniq.end()};
}

std::vector<double> constraint_values(const std::vector<double>& w, const ActionSet& actions) {
    const DesignMatrix m = gram(w, actions);
    std::vector<double> out(actions.size(), kInf);
    Eigen::LLT<Matrix> llt(m.matrix());
    if (llt.info() == Eigen::Success) {
        for (std::size_t i = 0; i < actions.size(); ++i) {
            const Vector x = actions.arm(i);
            out[i] = x.dot(llt.solve(x));
        }
        return out;
    }
    try {
        const SpdFactor f(m);
        for (std::size_t i = 0; i < actions.size(); ++i) {
            try {
                out[i] = f.quad_norm(actions.arm(i));
            } catch (const BanditError&) {
                out[i] = kInf;
            }
        }
    } catch (const BanditError&) {
    }
    return out;
}

}  // namespace

double beta_t(std::uint64_t t, std::size_t n_arms, double delta, double scale) {
    return scale * 32768.0 * std::log(static_cast<double>(t) * static_cast<double>(n_arms) / delta);
}

ArmDistribution exploration_design(std::span<const std::size_t> subset, const ActionSet& actions, double kappa,
                                   const DesignConfig& config) {
    const auto support = checked_subset(subset, actions.size());
    if (!(kappa > 0.0 && kappa <= 0.5)) throw BanditError(ErrorCode::DomainError, "kappa must lie in (0, 1/2]");
    const auto n = actions.size();
    const double d = static_cast<double>(actions.dim());

    LogDetProblem prob;
    prob.arms = &actions.matrix();
    prob.support = support;
    prob.cost.assign(n, 0.0);
    prob.weight = 1.0;
    prob.scale = 1.0 - kappa;
    prob.base = gram(std::vector<double>(n, kappa / static_cast<double>(n)), actions).matrix();

    std::vector<double> q(n, 0.0);
    for (auto i : support) q[i] = 1.0 / static_cast<double>(support.size());
    // At a gap-g stationary point every x in the support has
    // (1 - kappa) ||x||^2 <= d + g, so a tight gap certifies the 2d bound.
    const auto res = minimise_logdet(prob, std::move(q), config.gap_tol * d, std::max(config.max_iterations, 1) * 40);

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = kappa / static_cast<double>(n) + (1.0 - kappa) * res.q[i];
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& wi : w) wi /= sum;
    return ArmDistribution(std::move(w));
}

std::vector<double> op_bounds(std::uint64_t t, std::span<const double> gap_estimates, std::size_t dim, double beta) {
    std::vector<double> out(gap_estimates.size());
    const double tt = static_cast<double>(t);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = tt * gap_estimates[i] * gap_estimates[i] / beta + 4.0 * static_cast<double>(dim);
    return out;
}

FeasibilityReport op_feasibility_check(const ArmDistribution& p, std::uint64_t t, std::span<const double> gap_estimates,
                                       double beta, const ActionSet& actions, double rel_tol) {
    if (p.size() != actions.size() || gap_estimates.size() != actions.size())
        throw BanditError(ErrorCode::LengthMismatch, "distribution, gaps and actions differ in size");
    const auto bounds = op_bounds(t, gap_estimates, actions.dim(), beta);
    const auto values = constraint_values(p.weights(), actions);
    FeasibilityReport rep;
    rep.slack.resize(actions.size());
    rep.max_violation = -kInf;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        rep.slack[i] = std::isfinite(values[i]) ? bounds[i] - values[i] : -kInf;
        const double viol = std::isfinite(values[i]) ? (values[i] - bounds[i]) / bounds[i] : kInf;
        rep.max_violation = std::max(rep.max_violation, viol);
    }
    rep.feasible = rep.max_violation <= rel_tol;
    return rep;
}

OpSolution solve_op(std::uint64_t t, std::span<const double> gap_estimates, const ActionSet& actions, double beta,
                    double tol, bool refine) {
    const auto n = actions.size();
    if (gap_estimates.size() != n) throw BanditError(ErrorCode::LengthMismatch, "one gap estimate per arm expected");
    for (double g : gap_estimates)
        if (!std::isfinite(g) || g < 0.0) throw BanditError(ErrorCode::NonFiniteGaps, "gap estimates must be finite and nonnegative");
    if (t < 1) throw BanditError(ErrorCode::DomainError, "OP needs t >= 1");
    if (!(beta > 0.0)) throw BanditError(ErrorCode::DomainError, "beta must be positive");

    const double d = static_cast<double>(actions.dim());
    const double root_t = std::sqrt(static_cast<double>(t));
    const double xi = root_t / beta;
    OpSolution sol;
    sol.beta = beta;

    // Stage 1: log-det regularised surrogate.
    LogDetProblem prob;
    prob.arms = &actions.matrix();
    prob.support.resize(n);
    std::iota(prob.support.begin(), prob.support.end(), std::size_t{0});
    prob.cost.assign(gap_estimates.begin(), gap_estimates.end());
    prob.weight = 2.0 / xi;
    prob.scale = 1.0;
    prob.base = Matrix::Zero(actions.dim(), actions.dim());
    const auto stage1 = minimise_logdet(prob, std::vector<double>(n, 1.0 / static_cast<double>(n)), tol * d / xi, 5000);
    sol.iterations = stage1.iterations;

    // Stage 2: mix with the exploration design on near-zero-gap arms.
    const double kappa = std::min(1.0 / root_t, 0.5);
    std::vector<std::size_t> near_zero;
    for (std::size_t i = 0; i < n; ++i)
        if (gap_estimates[i] <= 1.0 / root_t) near_zero.push_back(i);
    if (near_zero.empty()) {
        const double lowest = *std::min_element(gap_estimates.begin(), gap_estimates.end());
        for (std::size_t i = 0; i < n; ++i)
            if (gap_estimates[i] == lowest) near_zero.push_back(i);
    }
    double stage1_sum = std::accumulate(stage1.q.begin(), stage1.q.end(), 0.0);
    std::vector<double> p_star(stage1.q);
    for (auto& v : p_star) v /= stage1_sum;
    ArmDistribution q = ArmDistribution::mix(ArmDistribution(p_star), exploration_design(near_zero, actions, kappa), 0.5);

    auto rep = op_feasibility_check(q, t, gap_estimates, beta, actions);
    if (!rep.feasible) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const ArmDistribution spread = exploration_design(all, actions, kappa);
        while (!rep.feasible && sol.fallback_halvings < 60) {
            q = ArmDistribution::mix(q, spread, 0.5);
            ++sol.fallback_halvings;
            rep = op_feasibility_check(q, t, gap_estimates, beta, actions);
        }
        if (!rep.feasible) throw BanditError(ErrorCode::Unbounded, "could not reach a feasible OP point");
    }
    auto objective = [&](const ArmDistribution& p) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i] * gap_estimates[i];
        return s;
    };
    sol.p = q;
    sol.construction_objective = objective(q);
    sol.objective = sol.construction_objective;
    sol.max_violation = rep.max_violation;

    if (!refine || sol.construction_objective == 0.0) return sol;

    // Stage 3: polish the certified point into a minimiser of OP itself.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const ArmDistribution start = ArmDistribution::mix(q, exploration_design(all, actions, 0.5), 1e-3);
    BarrierProblem bp;
    bp.arms = &actions.matrix();
    bp.base = Matrix::Zero(actions.dim(), actions.dim());
    bp.cost.assign(gap_estimates.begin(), gap_estimates.end());
    bp.constrained = all;
    bp.bound = op_bounds(t, gap_estimates, actions.dim(), beta);
    bp.upper.assign(n, kInf);
    bp.simplex = true;
    bp.rel_gap = 1e-6;
    bp.abs_gap = 1e-12;
    try {
        int steps = 0;
        auto z = BarrierSolver(bp).solve(start.weights(), &steps);
        const double sum = std::accumulate(z.begin(), z.end(), 0.0);
        for (auto& v : z) v = std::max(v, 0.0) / sum;
        ArmDistribution refined(std::move(z));
        const auto rrep = op_feasibility_check(refined, t, gap_estimates, beta, actions);
        const double robj = objective(refined);
        if (rrep.feasible && robj <= sol.construction_objective) {
            sol.p = std::move(refined);
            sol.objective = robj;
            sol.max_violation = rrep.max_violation;
            sol.refined = true;
            sol.iterations += steps;
        }
    } catch (const BanditError&) {
        // keep the certified construction
    }
    return sol;
}

DesignWeights instance_constant_construction(const BanditInstance& instance) {
    const auto n = instance.size();
    const double dmin = instance.delta_min();
    const double d = static_cast<double>(instance.dim());
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == instance.optimal_index()) continue;
        const double ratio = instance.gap(i) * instance.gap(i) / (dmin * dmin);
        // gap^2 in [2^{k-1}, 2^k) * dmin^2  <=>  k = floor(log2(ratio)) + 1
        auto k = static_cast<std::size_t>(std::floor(std::log2(ratio) + 1e-12)) + 1;
        if (groups.size() < k) groups.resize(k);
        groups[k - 1].push_back(i);
    }
    const double last = static_cast<double>(groups.size());
    const double kappa = 1.0 / (static_cast<double>(n) * last * std::ldexp(1.0, static_cast<int>(groups.size())));

    DesignWeights w;
    w.n.assign(n, 0.0);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        if (groups[j].empty()) continue;
        const auto q = exploration_design(groups[j], instance.actions(), std::min(kappa, 0.5));
        const double coef = 4.0 * d / (std::ldexp(1.0, static_cast<int>(j)) * dmin * dmin);
        for (std::size_t i = 0; i < n; ++i)
            if (i != instance.optimal_index()) w.n[i] += coef * q[i];
    }
    w.n[instance.optimal_index()] = 0.5e9 / (dmin * dmin);
    return w;
}

InstanceConstant instance_constant_c(const BanditInstance& instance, double tol) {
    const auto n = instance.size();
    const auto star = instance.optimal_index();
    const double dmin = instance.delta_min();
    const double cap = 1e9 / (dmin * dmin);

    InstanceConstant out;
    const auto start = instance_constant_construction(instance);
    for (std::size_t i = 0; i < n; ++i) out.construction_value += start.n[i] * instance.gap(i);

    BarrierProblem bp;
    bp.arms = &instance.actions().matrix();
    bp.base = Matrix::Zero(instance.dim(), instance.dim());
    bp.cost = instance.gaps();
    bp.upper.assign(n, kInf);
    bp.upper[star] = cap;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == star) continue;
        bp.constrained.push_back(i);
        bp.bound.push_back(0.5 * instance.gap(i) * instance.gap(i));
    }
    bp.simplex = false;
    bp.rel_gap = tol / 20.0;
    bp.abs_gap = 1e-9 * out.construction_value;

    std::vector<double> z0 = start.n;
    for (std::size_t i = 0; i < n; ++i)
        if (i != star) z0[i] *= 2.0;  // halves every constraint value: strictly interior
    std::vector<double> z;
    try {
        z = BarrierSolver(bp).solve(z0, nullptr);
    } catch (const BanditError& e) {
        throw BanditError(ErrorCode::Unbounded, std::string("instance constant solve failed: ") + e.what());
    }

    const auto values = constraint_values(z, instance.actions());
    out.max_violation = -kInf;
    for (std::size_t k = 0; k < bp.constrained.size(); ++k) {
        const auto i = bp.constrained[k];
        out.max_violation = std::max(out.max_violation, (values[i] - bp.bound[k]) / bp.bound[k]);
    }
    if (!(out.max_violation <= 1e-6)) throw BanditError(ErrorCode::Unbounded, "instance constant solution is infeasible (violation " + std::to_string(out.max_violation) + ")");
    out.weights.n = std::move(z);
    for (std::size_t i = 0; i < n; ++i)
        if (i != star) out.value += out.weights.n[i] * instance.gap(i);
    return out;
}

double orthonormal_oracle(std::span<const double> gaps) {
    const auto zeros = std::count(gaps.begin(), gaps.end(), 0.0);
    if (zeros != 1) throw BanditError(ErrorCode::DomainError, "orthonormal oracle needs exactly one zero gap");
    double s = 0.0;
    for (double g : gaps) {
        if (g < 0.0) throw BanditError(ErrorCode::DomainError, "negative gap");
        if (g > 0.0) s += 2.0 / g;
    }
    return s;
}

double orthonormal_oracle(const BanditInstance& instance) {
    const Matrix& x = instance.actions().matrix();
    if (x.rows() != x.cols() || !(x * x.transpose()).isApprox(Matrix::Identity(x.rows(), x.rows()), 1e-9))
        throw BanditError(ErrorCode::NonOrthonormal, "action set is not orthonormal");
    return orthonormal_oracle(instance.gaps());
}

double max_quad_norm(const ArmDistribution& p, std::span<const std::size_t> subset, const ActionSet& actions) {
    const auto values = constraint_values(p.weights(), actions);
    double best = 0.0;
    for (auto i : subset) best = std::max(best, values.at(i));
    return best;
}

}  // namespace banditlab
