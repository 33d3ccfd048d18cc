#include "twist/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twist {

GlobalConstraint::GlobalConstraint(std::vector<std::uint32_t> radii)
    : radii_(std::move(radii)) {
    const std::size_t n = radii_.size();
    for (std::uint32_t r : radii_) {
        if (r > n) {
            throw_invalid("constraint radius " + std::to_string(r) +
                          " exceeds sequence length " + std::to_string(n));
        }
    }
}

GlobalConstraint GlobalConstraint::sakoe_chiba(double width_fraction, std::size_t n) {
    if (!(width_fraction >= 0.0 && width_fraction <= 1.0)) {
        throw_invalid("band width fraction must lie in [0, 1]");
    }
    const auto radius =
        static_cast<std::uint32_t>(std::llround(width_fraction * static_cast<double>(n)));
    return GlobalConstraint(std::vector<std::uint32_t>(n, radius));
}

GlobalConstraint GlobalConstraint::unconstrained(std::size_t n) {
    return GlobalConstraint(std::vector<std::uint32_t>(n, static_cast<std::uint32_t>(n)));
}

bool GlobalConstraint::is_uniform() const noexcept {
    return std::all_of(radii_.begin(), radii_.end(),
                       [&](std::uint32_t r) { return r == radii_.front(); });
}

GlobalConstraint sakoe_chiba(double width_fraction, std::size_t n) {
    return GlobalConstraint::sakoe_chiba(width_fraction, n);
}

double pow_p(double d, int p) noexcept {
    switch (p) {
        case 1: return std::abs(d);
        case 2: return d * d;
        default: return std::pow(std::abs(d), p);
    }
}

double finalize_distance(double unrooted, const DistanceParams& params) noexcept {
    if (!params.apply_root) return unrooted;
    if (params.p == 2) return std::sqrt(unrooted);
    if (params.p == 1) return unrooted;
    return std::pow(unrooted, 1.0 / params.p);
}

double unfinalize_distance(double rooted, const DistanceParams& params) noexcept {
    if (!params.apply_root || params.p == 1) return rooted;
    return std::pow(rooted, params.p);
}

double dtw_unrooted(std::span<const double> q, std::span<const double> c,
                    const GlobalConstraint& r, int p, double abandon_above) {
    const std::size_t n = q.size();
    if (c.size() != n) {
        throw_invalid("dtw requires equal-length sequences (" + std::to_string(n) +
                      " vs " + std::to_string(c.size()) + ")");
    }
    if (r.length() != n) {
        throw_invalid("constraint length " + std::to_string(r.length()) +
                      " does not match sequence length " + std::to_string(n));
    }
    if (n == 0) return 0.0;

    const std::vector<std::uint32_t>& radii = r.radii();
    std::vector<double> prev(n + 1, kInfinity);
    std::vector<double> curr(n + 1, kInfinity);
    prev[0] = 0.0;

    // Column j admits rows i <= j + r_j; since that reach is non-decreasing in
    // the sweep below, cells left of first_j are inadmissible for the row.
    std::size_t first_j = 1;
    const bool abandon = abandon_above < kInfinity;

    for (std::size_t i = 1; i <= n; ++i) {
        while (first_j <= n && first_j + radii[first_j - 1] < i) ++first_j;
        const std::size_t last_j = std::min(n, i + radii[i - 1]);

        std::fill(curr.begin(), curr.end(), kInfinity);
        const double qi = q[i - 1];
        double row_min = kInfinity;
        for (std::size_t j = first_j; j <= last_j; ++j) {
            if (j + radii[j - 1] < i) continue; // band hole in a non-uniform constraint
            const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
            const double cell = best + pow_p(qi - c[j - 1], p);
            curr[j] = cell;
            row_min = std::min(row_min, cell);
        }
        if (abandon && row_min > abandon_above) return kInfinity;
        std::swap(prev, curr);
    }
    return prev[n];
}

double dtw(const TimeSeries& q, const TimeSeries& c, const GlobalConstraint& r,
           const DistanceParams& params) {
    return finalize_distance(dtw_unrooted(q.values, c.values, r, params.p), params);
}

} // namespace twist
