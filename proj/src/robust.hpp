#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace banditlab {

struct CatoniParams {
    double alpha = 1.0;
    double clip_lo = -1.0;
    double clip_hi = 1.0;
};

/// Catoni's influence function: log(1 + y + y^2/2) for y >= 0, odd extension below.
double psi(double y) noexcept;

/// f(z) = sum_i psi(alpha * (x_i - z)); strictly decreasing in z.
double catoni_score(std::span<const double> samples, double alpha, double z) noexcept;

/// Unique root of catoni_score, found by bisection on
/// [min - 3/alpha, max + 3/alpha]. Throws EmptySamples / DomainError.
double catoni_estimate(std::span<const double> samples, double alpha);

/// Multiset of samples stored as distinct values with multiplicities.
/// Catoni's estimator is permutation invariant, so this is a lossless
/// buffer; it collapses to a handful of entries when the samples take few
/// distinct values.
class SampleMultiset {
public:
    void add(double v, std::uint64_t count = 1);
    void clear();

    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return total_ == 0; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }
    double sum() const noexcept;

private:
    std::vector<double> values_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<double, std::size_t> index_;
    std::uint64_t total_ = 0;
    double min_ = 0.0;
    double max_ = 0.0;
};

double catoni_score(const SampleMultiset& samples, double alpha, double z) noexcept;
double catoni_estimate(const SampleMultiset& samples, double alpha);

/// Clamp v to [lo, hi]. Throws BadBounds when lo > hi.
double clip(double v, double lo, double hi);

/// Clip(Catoni(samples)) with the bounds from params.
double robust_mean(std::span<const double> samples, const CatoniParams& params);

/// Block-level Catoni parameter used by the doubling-block algorithm:
/// sqrt(4 ln(2^m |X| / delta) / (2^m * norm_sq + 2^m)).
double alpha_block(int m, double norm_sq, std::size_t n_arms, double delta);

/// Phase-2 Catoni parameter:
/// sqrt(4 ln(t |X| / delta) / (t - t0 + cum_norm_sq)), where cum_norm_sq
/// already includes the factor 2 on each ||x||^2 term.
double alpha_phase2(std::uint64_t t, std::uint64_t t0, double cum_norm_sq, std::size_t n_arms, double delta);

}  // namespace banditlab
