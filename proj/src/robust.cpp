#include "robust.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace banditlab {

double psi(double y) noexcept {
    if (y >= 0.0) return std::log1p(y + 0.5 * y * y);
    return -std::log1p(-y + 0.5 * y * y);
}

namespace {

struct Unit {
    std::uint64_t operator[](std::size_t) const noexcept { return 1; }
};

template <class Counts>
double score(std::span<const double> values, const Counts& counts, double alpha, double z) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += static_cast<double>(counts[i]) * psi(alpha * (values[i] - z));
    return s;
}

template <class Counts>
double estimate(std::span<const double> values, const Counts& counts, double n, double lo_sample, double hi_sample,
                double alpha) {
    if (values.empty()) throw BanditError(ErrorCode::EmptySamples, "Catoni estimator needs at least one sample");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw BanditError(ErrorCode::DomainError, "alpha must be positive");
    if (!std::isfinite(lo_sample) || !std::isfinite(hi_sample))
        throw BanditError(ErrorCode::DomainError, "non-finite Catoni sample");
    if (lo_sample == hi_sample) return lo_sample;

    double lo = lo_sample - 3.0 / alpha;
    double hi = hi_sample + 3.0 / alpha;
    // psi(3) > 0 guarantees the bracket; checked, not assumed.
    if (!(score(values, counts, alpha, lo) > 0.0) || !(score(values, counts, alpha, hi) < 0.0))
        throw BanditError(ErrorCode::DomainError, "Catoni root not bracketed");

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = score(values, counts, alpha, mid);
        if (std::abs(f) <= 1e-12 * n) return mid;
        if (f > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double catoni_score(std::span<const double> samples, double alpha, double z) noexcept {
    return score(samples, Unit{}, alpha, z);
}

double catoni_estimate(std::span<const double> samples, double alpha) {
    if (samples.empty()) throw BanditError(ErrorCode::EmptySamples, "Catoni estimator needs at least one sample");
    const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
    return estimate(samples, Unit{}, static_cast<double>(samples.size()), *min_it, *max_it, alpha);
}

void SampleMultiset::add(double v, std::uint64_t count) {
    if (count == 0) return;
    if (v == 0.0) v = 0.0;  // fold -0.0 into +0.0
    auto [it, inserted] = index_.try_emplace(v, values_.size());
    if (inserted) {
        values_.push_back(v);
        counts_.push_back(count);
    } else {
        counts_[it->second] += count;
    }
    if (total_ == 0) {
        min_ = max_ = v;
    } else {
        min_ = std::min(min_, v);
        max_ = std::max(max_, v);
    }
    total_ += count;
}

void SampleMultiset::clear() {
    values_.clear();
    counts_.clear();
    index_.clear();
    total_ = 0;
    min_ = max_ = 0.0;
}

double SampleMultiset::sum() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += static_cast<double>(counts_[i]) * values_[i];
    return s;
}

double catoni_score(const SampleMultiset& samples, double alpha, double z) noexcept {
    return score(samples.values(), samples.counts(), alpha, z);
}

double catoni_estimate(const SampleMultiset& samples, double alpha) {
    return estimate(samples.values(), samples.counts(), static_cast<double>(samples.total()), samples.min(),
                    samples.max(), alpha);
}

double clip(double v, double lo, double hi) {
    if (lo > hi) throw BanditError(ErrorCode::BadBounds, "clip lower bound exceeds upper bound");
    return std::min(std::max(v, lo), hi);
}

double robust_mean(std::span<const double> samples, const CatoniParams& params) {
    return clip(catoni_estimate(samples, params.alpha), params.clip_lo, params.clip_hi);
}

double alpha_block(int m, double norm_sq, std::size_t n_arms, double delta) {
    const double len = std::ldexp(1.0, m);
    return std::sqrt(4.0 * std::log(len * static_cast<double>(n_arms) / delta) / (len * norm_sq + len));
}

double alpha_phase2(std::uint64_t t, std::uint64_t t0, double cum_norm_sq, std::size_t n_arms, double delta) {
    const double tt = static_cast<double>(t);
    const double denom = static_cast<double>(t - t0) + cum_norm_sq;
    return std::sqrt(4.0 * std::log(tt * static_cast<double>(n_arms) / delta) / denom);
}

}  // namespace banditlab
