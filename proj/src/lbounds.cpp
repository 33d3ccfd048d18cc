#include "twist/lbounds.hpp"

#include <algorithm>
#include <string>

namespace twist {

namespace {

void check_equal_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw_invalid(std::string(what) + " length mismatch (" + std::to_string(a) +
                      " vs " + std::to_string(b) + ")");
    }
}

// Window extrema over values[i-r_i .. i+r_i], indices clamped to the sequence.
void windowed_extrema(std::span<const double> upper_src, std::span<const double> lower_src,
                      const GlobalConstraint& r, std::vector<double>& upper_out,
                      std::vector<double>& lower_out) {
    const std::size_t n = upper_src.size();
    upper_out.resize(n);
    lower_out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t radius = r.radius(i);
        const std::size_t lo = i >= radius ? i - radius : 0;
        const std::size_t hi = std::min(n - 1, i + radius);
        double u = upper_src[lo];
        double l = lower_src[lo];
        for (std::size_t j = lo + 1; j <= hi; ++j) {
            u = std::max(u, upper_src[j]);
            l = std::min(l, lower_src[j]);
        }
        upper_out[i] = u;
        lower_out[i] = l;
    }
}

// Out-of-envelope area between a sequence and an upper/lower hull (Keogh style).
double envelope_area_unrooted(std::span<const double> s, std::span<const double> upper,
                              std::span<const double> lower, int p,
                              double abandon_above = kInfinity) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = s[i];
        if (v > upper[i]) {
            sum += pow_p(v - upper[i], p);
        } else if (v < lower[i]) {
            sum += pow_p(lower[i] - v, p);
        } else {
            continue;
        }
        if (sum > abandon_above) return kInfinity;
    }
    return sum;
}

// Shared warping DP over two segmented max/min hulls. The per-cell weight is
// the raw point count of the shorter of the two segments, so trailing short
// segments never overcount.
double segment_dp_unrooted(std::span<const double> a_upper, std::span<const double> a_lower,
                           std::span<const double> b_upper, std::span<const double> b_lower,
                           std::size_t t_size, std::size_t a_len, std::size_t b_len, int p,
                           double abandon_above) {
    const std::size_t ta = a_upper.size();
    const std::size_t tb = b_upper.size();
    std::vector<double> prev(tb + 1, kInfinity);
    std::vector<double> curr(tb + 1, kInfinity);
    prev[0] = 0.0;
    const bool abandon = abandon_above < kInfinity;
    for (std::size_t i = 1; i <= ta; ++i) {
        curr[0] = kInfinity;
        const double ua = a_upper[i - 1];
        const double la = a_lower[i - 1];
        const std::size_t wa =
            std::min(t_size, a_len - (i - 1) * t_size);
        double row_min = kInfinity;
        for (std::size_t j = 1; j <= tb; ++j) {
            const double ub = b_upper[j - 1];
            const double lb = b_lower[j - 1];
            double d = 0.0;
            if (la > ub) {
                d = pow_p(la - ub, p);
            } else if (lb > ua) {
                d = pow_p(lb - ua, p);
            }
            const std::size_t wb = std::min(t_size, b_len - (j - 1) * t_size);
            const double weight = static_cast<double>(std::min(wa, wb));
            const double cell = weight * d + std::min({prev[j - 1], prev[j], curr[j - 1]});
            curr[j] = cell;
            row_min = std::min(row_min, cell);
        }
        // Every segment path crosses every row, so a row minimum above the
        // threshold bounds the final cell from below.
        if (abandon && row_min > abandon_above) return kInfinity;
        std::swap(prev, curr);
    }
    return prev[tb];
}

} // namespace

bool GroupEnvelope::contains(std::span<const double> values) const noexcept {
    if (values.size() != upper.size()) return false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > upper[i] || values[i] < lower[i]) return false;
    }
    return true;
}

QueryEnvelope build_query_envelope(const TimeSeries& q, const GlobalConstraint& r) {
    check_equal_length(q.length(), r.length(), "query/constraint");
    QueryEnvelope env;
    windowed_extrema(q.values, q.values, r, env.upper, env.lower);
    return env;
}

double lb_keogh_unrooted(const QueryEnvelope& env, std::span<const double> c, int p,
                         double abandon_above) {
    check_equal_length(env.upper.size(), c.size(), "envelope/candidate");
    return envelope_area_unrooted(c, env.upper, env.lower, p, abandon_above);
}

double lb_keogh(const QueryEnvelope& env, const TimeSeries& c, const DistanceParams& params) {
    return finalize_distance(lb_keogh_unrooted(env, c.values, params.p), params);
}

SegmentedSequence segment(std::span<const double> values, std::size_t t_size) {
    if (t_size < 1) throw_invalid("segment size must be at least 1");
    SegmentedSequence out;
    out.segment_size = t_size;
    out.source_length = values.size();
    for (std::size_t start = 0; start < values.size(); start += t_size) {
        const std::size_t end = std::min(start + t_size, values.size());
        double u = values[start];
        double l = values[start];
        for (std::size_t i = start + 1; i < end; ++i) {
            u = std::max(u, values[i]);
            l = std::min(l, values[i]);
        }
        out.upper.push_back(u);
        out.lower.push_back(l);
    }
    return out;
}

double lbs_unrooted(const SegmentedSequence& q_seg, const SegmentedSequence& c_seg, int p,
                    double abandon_above) {
    if (q_seg.segment_size != c_seg.segment_size) {
        throw_invalid("segment size mismatch (" + std::to_string(q_seg.segment_size) +
                      " vs " + std::to_string(c_seg.segment_size) + ")");
    }
    return segment_dp_unrooted(q_seg.upper, q_seg.lower, c_seg.upper, c_seg.lower,
                               q_seg.segment_size, q_seg.source_length,
                               c_seg.source_length, p, abandon_above);
}

double lbs(const SegmentedSequence& q_seg, const SegmentedSequence& c_seg,
           const DistanceParams& params) {
    return finalize_distance(lbs_unrooted(q_seg, c_seg, params.p), params);
}

GroupEnvelope build_group_envelope(std::span<const TimeSeries> members) {
    if (members.empty()) throw_invalid("group envelope requires at least one member");
    const std::size_t n = members.front().length();
    GroupEnvelope eg;
    eg.upper = members.front().values;
    eg.lower = members.front().values;
    eg.member_count = 1;
    for (std::size_t m = 1; m < members.size(); ++m) {
        check_equal_length(members[m].length(), n, "group member");
        for (std::size_t i = 0; i < n; ++i) {
            eg.upper[i] = std::max(eg.upper[i], members[m].values[i]);
            eg.lower[i] = std::min(eg.lower[i], members[m].values[i]);
        }
        ++eg.member_count;
    }
    return eg;
}

SegmentedGroupEnvelope segment_group_envelope(const GroupEnvelope& eg, std::size_t t_size) {
    if (t_size < 1) throw_invalid("segment size must be at least 1");
    SegmentedGroupEnvelope out;
    out.segment_size = t_size;
    out.source_length = eg.length();
    for (std::size_t start = 0; start < eg.length(); start += t_size) {
        const std::size_t end = std::min(start + t_size, eg.length());
        double u = eg.upper[start];
        double l = eg.lower[start];
        for (std::size_t i = start + 1; i < end; ++i) {
            u = std::max(u, eg.upper[i]);
            l = std::min(l, eg.lower[i]);
        }
        out.upper.push_back(u);
        out.lower.push_back(l);
    }
    return out;
}

double lbg_unrooted(const SegmentedSequence& q_seg, const SegmentedGroupEnvelope& eg_seg,
                    int p, double abandon_above) {
    if (q_seg.segment_size != eg_seg.segment_size) {
        throw_invalid("segment size mismatch (" + std::to_string(q_seg.segment_size) +
                      " vs " + std::to_string(eg_seg.segment_size) + ")");
    }
    return segment_dp_unrooted(q_seg.upper, q_seg.lower, eg_seg.upper, eg_seg.lower,
                               q_seg.segment_size, q_seg.source_length,
                               eg_seg.source_length, p, abandon_above);
}

double lbg(const SegmentedSequence& q_seg, const SegmentedGroupEnvelope& eg_seg,
           const DistanceParams& params) {
    return finalize_distance(lbg_unrooted(q_seg, eg_seg, params.p), params);
}

ConstraintExpandedEnvelope expand_envelope_by_constraint(const GroupEnvelope& eg,
                                                         const GlobalConstraint& r) {
    check_equal_length(eg.length(), r.length(), "envelope/constraint");
    ConstraintExpandedEnvelope egc;
    windowed_extrema(eg.upper, eg.lower, r, egc.upper, egc.lower);
    return egc;
}

double lbg_k_unrooted(std::span<const double> q, const ConstraintExpandedEnvelope& egc,
                      int p) {
    check_equal_length(q.size(), egc.upper.size(), "query/envelope");
    return envelope_area_unrooted(q, egc.upper, egc.lower, p);
}

double lbg_k(const TimeSeries& q, const ConstraintExpandedEnvelope& egc,
             const DistanceParams& params) {
    return finalize_distance(lbg_k_unrooted(q.values, egc, params.p), params);
}

std::vector<std::size_t> default_ladder(std::size_t n) {
    std::vector<std::size_t> ladder;
    for (std::size_t divisor : {std::size_t{2}, std::size_t{8}, std::size_t{32}, std::size_t{128}}) {
        const std::size_t t = std::max<std::size_t>(1, n / divisor);
        if (ladder.empty() || t < ladder.back()) ladder.push_back(t);
    }
    return ladder;
}

} // namespace twist
