#include "linalg.hpp"

#include "errors.hpp"

#include <cmath>

namespace banditlab {

namespace {
constexpr double kRangeTolerance = 1e-10;
}

DesignMatrix::DesignMatrix(const Matrix& m) : m_(0.5 * (m + m.transpose())) {
    if (m.rows() != m.cols()) throw BanditError(ErrorCode::LengthMismatch, "design matrix must be square");
}

DesignMatrix gram(std::span<const double> weights, const ActionSet& actions, double ridge) {
    if (weights.size() != actions.size()) throw BanditError(ErrorCode::LengthMismatch, "one weight per arm expected");
    const auto& x = actions.matrix();
    const auto d = x.cols();
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double w = weights[static_cast<std::size_t>(i)];
        if (!std::isfinite(w) || w < 0.0) throw BanditError(ErrorCode::DomainError, "gram weights must be finite and nonnegative");
        if (w == 0.0) continue;
        m.selfadjointView<Eigen::Lower>().rankUpdate(x.row(i).transpose(), w);
    }
    m = m.selfadjointView<Eigen::Lower>();
    if (ridge != 0.0) m.diagonal().array() += ridge;
    return DesignMatrix(m);
}

SpdFactor::SpdFactor(const DesignMatrix& m) : m_(m.matrix()), ldlt_(m.matrix()) {
    if (ldlt_.info() != Eigen::Success) throw BanditError(ErrorCode::NotPD, "LDLT factorisation failed");
}

Vector SpdFactor::solve(const Vector& b) const {
    if (b.size() != m_.rows()) throw BanditError(ErrorCode::LengthMismatch, "solve dimension");
    Vector z = ldlt_.solve(b);
    const double scale = 1.0 + b.norm();
    if (!z.allFinite() || (m_ * z - b).norm() > kRangeTolerance * scale)
        throw BanditError(ErrorCode::SingularDirection, "vector has a component outside the range of the design matrix");
    return z;
}

double SpdFactor::quad_norm(const Vector& x) const {
    return std::max(0.0, x.dot(solve(x)));
}

double SpdFactor::bilinear(const Vector& x, const Vector& y) const {
    return x.dot(solve(y));
}

double quad_norm(const Vector& x, const DesignMatrix& m) {
    return SpdFactor(m).quad_norm(x);
}

double log_det(const DesignMatrix& m) {
    Eigen::LLT<Matrix> llt(m.matrix());
    if (llt.info() != Eigen::Success) throw BanditError(ErrorCode::NotPD, "matrix is not positive definite");
    const auto diag = llt.matrixLLT().diagonal();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0)) throw BanditError(ErrorCode::NotPD, "zero pivot");
        sum += 2.0 * std::log(diag(i));
    }
    return sum;
}

Matrix inverse_form_table(const DesignMatrix& m, const ActionSet& actions) {
    const SpdFactor f(m);
    const auto& x = actions.matrix();
    Matrix solved(x.cols(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) solved.col(i) = f.solve(x.row(i).transpose());
    Matrix table = x * solved;
    return 0.5 * (table + table.transpose());
}

}  // namespace banditlab
