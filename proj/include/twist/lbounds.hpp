#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twist/core.hpp"

namespace twist {

/// Pointwise max/min hull of a query under a warping band.
struct QueryEnvelope {
    std::vector<double> upper;
    std::vector<double> lower;
};

/// Piecewise max/min reduction of a sequence at segment size T. A trailing
/// segment shorter than T is permitted; its DP weight is its point count.
struct SegmentedSequence {
    std::size_t segment_size = 1;
    std::size_t source_length = 0;
    std::vector<double> upper;
    std::vector<double> lower;

    std::size_t segment_count() const noexcept { return upper.size(); }
    std::size_t points_in(std::size_t b) const noexcept {
        const std::size_t start = b * segment_size;
        const std::size_t end = std::min(start + segment_size, source_length);
        return end - start;
    }
};

/// Pointwise max/min hull over the member sequences of one page.
struct GroupEnvelope {
    std::vector<double> upper;
    std::vector<double> lower;
    std::uint32_t member_count = 0;

    std::size_t length() const noexcept { return upper.size(); }
    bool contains(std::span<const double> values) const noexcept;
};

/// Blockwise reduction of a group envelope (max of uppers, min of lowers).
struct SegmentedGroupEnvelope {
    std::size_t segment_size = 1;
    std::size_t source_length = 0;
    std::vector<double> upper;
    std::vector<double> lower;

    std::size_t segment_count() const noexcept { return upper.size(); }
    std::size_t points_in(std::size_t b) const noexcept {
        const std::size_t start = b * segment_size;
        const std::size_t end = std::min(start + segment_size, source_length);
        return end - start;
    }
};

/// Group envelope widened by the warping band, for the single-pass bound.
struct ConstraintExpandedEnvelope {
    std::vector<double> upper;
    std::vector<double> lower;
};

QueryEnvelope build_query_envelope(const TimeSeries& q, const GlobalConstraint& r);

// The unrooted bound kernels accept the same opportunistic early-abandon
// threshold as the distance kernel: once the accumulation (or a DP row
// minimum) exceeds abandon_above the true bound provably does too and
// +infinity is returned. Pruning decisions are unchanged; with an infinite
// threshold the results are bit-identical.
double lb_keogh_unrooted(const QueryEnvelope& env, std::span<const double> c, int p,
                         double abandon_above = kInfinity);
double lb_keogh(const QueryEnvelope& env, const TimeSeries& c,
                const DistanceParams& params = {});

SegmentedSequence segment(std::span<const double> values, std::size_t t_size);
inline SegmentedSequence segment(const TimeSeries& s, std::size_t t_size) {
    return segment(std::span<const double>(s.values), t_size);
}

double lbs_unrooted(const SegmentedSequence& q_seg, const SegmentedSequence& c_seg, int p,
                    double abandon_above = kInfinity);
double lbs(const SegmentedSequence& q_seg, const SegmentedSequence& c_seg,
           const DistanceParams& params = {});

GroupEnvelope build_group_envelope(std::span<const TimeSeries> members);

SegmentedGroupEnvelope segment_group_envelope(const GroupEnvelope& eg, std::size_t t_size);

double lbg_unrooted(const SegmentedSequence& q_seg, const SegmentedGroupEnvelope& eg_seg,
                    int p, double abandon_above = kInfinity);
double lbg(const SegmentedSequence& q_seg, const SegmentedGroupEnvelope& eg_seg,
           const DistanceParams& params = {});

ConstraintExpandedEnvelope expand_envelope_by_constraint(const GroupEnvelope& eg,
                                                         const GlobalConstraint& r);

double lbg_k_unrooted(std::span<const double> q, const ConstraintExpandedEnvelope& egc,
                      int p);
double lbg_k(const TimeSeries& q, const ConstraintExpandedEnvelope& egc,
             const DistanceParams& params = {});

/// Resolution ladder n/2, n/8, n/32, n/128 (each >= 1, duplicates removed,
/// strictly decreasing).
std::vector<std::size_t> default_ladder(std::size_t n);

} // namespace twist
