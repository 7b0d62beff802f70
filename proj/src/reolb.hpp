#pragma once

#include "core.hpp"
#include "linalg.hpp"
#include "robust.hpp"

#include <cstdint>
#include <vector>

namespace banditlab {

struct ReolbConfig {
    double delta = 0.1;
    double constant_scale = 1.0;  // multiplies the 2^15 in beta_t
};

/// x^T S^{-1} x_t y
double unbiased_estimate(const Vector& x, const Vector& x_t, double y, const SpdFactor& s);

/// Rob_x - min_x' Rob_x'
std::vector<double> gaps_from_robust(std::span<const double> robust_means);

/// Doubling-block algorithm: block m has length 2^m, plays OP(2^m, gaps)
/// and closes with clipped Catoni estimates of every arm's loss.
class Reolb {
public:
    Reolb(const ActionSet& actions, const ReolbConfig& config);

    /// Opens a new block when the previous one is complete, then samples.
    std::size_t choose(double u);
    void update(std::size_t arm, double y);

    int block() const noexcept { return m_; }
    std::uint64_t rounds() const noexcept { return rounds_; }
    std::uint64_t block_length() const noexcept { return std::uint64_t{1} << m_; }
    std::uint64_t rounds_in_block() const noexcept { return in_block_; }
    bool block_open() const noexcept { return open_; }

    const ArmDistribution& distribution() const noexcept { return p_; }
    const std::vector<double>& gap_estimates() const noexcept { return gaps_; }
    /// Rob of the last completed block (empty before the first one closes).
    const std::vector<double>& robust_means() const noexcept { return rob_prev_; }
    const std::vector<double>& last_estimates() const noexcept { return last_; }
    const std::vector<SampleMultiset>& buffers() const noexcept { return buffers_; }
    /// A(x, y) = x^T S_m^{-1} y for the current block.
    const Matrix& inverse_table() const noexcept { return table_; }
    double beta() const noexcept { return beta_; }

private:
    void begin_block();
    void end_block();

    const ActionSet* actions_;
    ReolbConfig config_;
    int m_ = 0;
    bool open_ = false;
    std::uint64_t rounds_ = 0;
    std::uint64_t in_block_ = 0;
    ArmDistribution p_;
    Matrix table_;
    double beta_ = 0.0;
    std::vector<double> gaps_;
    std::vector<double> rob_prev_;
    std::vector<double> last_;
    std::vector<SampleMultiset> buffers_;
};

}  // namespace banditlab
