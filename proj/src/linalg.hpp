#pragma once

#include "core.hpp"

#include <span>

namespace banditlab {

/// Symmetric d x d design matrix (sum of weighted outer products).
class DesignMatrix {
public:
    DesignMatrix() = default;
    /// Symmetrises the input as (M + M^T) / 2.
    explicit DesignMatrix(const Matrix& m);

    const Matrix& matrix() const noexcept { return m_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

private:
    Matrix m_;
};

/// sum_x w_x x x^T (+ ridge * I). Singular results are allowed.
DesignMatrix gram(std::span<const double> weights, const ActionSet& actions, double ridge = 0.0);

/// Pivoted LDL^T factorisation of a PSD design matrix. Solves succeed only
/// for right-hand sides in the range of the matrix; anything with a
/// component outside the range (at 1e-10) raises SingularDirection.
class SpdFactor {
public:
    explicit SpdFactor(const DesignMatrix& m);

    Vector solve(const Vector& b) const;
    /// x^T M^{-1} x
    double quad_norm(const Vector& x) const;
    /// x^T M^{-1} y
    double bilinear(const Vector& x, const Vector& y) const;

private:
    Matrix m_;
    Eigen::LDLT<Matrix> ldlt_;
};

/// ||x||^2_{M^{-1}} by factor-and-solve.
double quad_norm(const Vector& x, const DesignMatrix& m);

/// log det M via Cholesky. Throws NotPD.
double log_det(const DesignMatrix& m);

/// Arm-by-arm table A(x, y) = x^T M^{-1} y for every pair of arms.
Matrix inverse_form_table(const DesignMatrix& m, const ActionSet& actions);

}  // namespace banditlab
