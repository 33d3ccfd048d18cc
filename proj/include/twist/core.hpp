#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "twist/error.hpp"

namespace twist {

using SeqId = std::uint64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// An equal-length, real-valued sequence; the unit of storage and query.
struct TimeSeries {
    SeqId id = 0;
    std::vector<double> values;

    std::size_t length() const noexcept { return values.size(); }
};

/// Per-index warping-band radii, one per position. radius(i) is the band
/// height above the diagonal at row i and its width to the right at column i.
/// All-zero radii give pointwise (Euclidean-style) alignment; radii equal to
/// the length give unconstrained warping.
class GlobalConstraint {
public:
    explicit GlobalConstraint(std::vector<std::uint32_t> radii);

    /// Uniform band: every radius is round(width_fraction * n).
    static GlobalConstraint sakoe_chiba(double width_fraction, std::size_t n);
    static GlobalConstraint unconstrained(std::size_t n);

    std::size_t length() const noexcept { return radii_.size(); }
    std::uint32_t radius(std::size_t i) const noexcept { return radii_[i]; }
    const std::vector<std::uint32_t>& radii() const noexcept { return radii_; }

    bool is_uniform() const noexcept;

private:
    std::vector<std::uint32_t> radii_;
};

struct DistanceParams {
    int p = 2;              // L_p-norm dimension
    bool apply_root = true; // p-th root applied at the API boundary only
};

/// |d|^p for integer p >= 1.
double pow_p(double d, int p) noexcept;

/// Applies the boundary root (or not) to an unrooted accumulation.
double finalize_distance(double unrooted, const DistanceParams& params) noexcept;

/// Inverse of finalize_distance: maps an API-level distance back to the
/// unrooted domain used for internal comparisons.
double unfinalize_distance(double rooted, const DistanceParams& params) noexcept;

/// Band-constrained DTW on raw values, without the boundary root.
/// A matrix cell (i, j) (1-based) is admissible iff j <= i + r_i and
/// i <= j + r_j; inadmissible cells carry infinite cost. The diagonal is
/// always admissible, so a path exists for every valid constraint.
///
/// If the minimum of some DP row exceeds abandon_above, the true distance
/// provably exceeds it too and +infinity is returned. With an infinite
/// threshold the result is bit-identical to the plain computation.
double dtw_unrooted(std::span<const double> q, std::span<const double> c,
                    const GlobalConstraint& r, int p,
                    double abandon_above = kInfinity);

/// Constrained DTW distance, rooted per params.
double dtw(const TimeSeries& q, const TimeSeries& c, const GlobalConstraint& r,
           const DistanceParams& params = {});

GlobalConstraint sakoe_chiba(double width_fraction, std::size_t n);

} // namespace twist
