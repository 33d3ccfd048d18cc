#pragma once

#include <cstdint>
#include <vector>

#include "twist/index.hpp"

namespace twist {

struct Hit {
    SeqId id = 0;
    double distance = 0.0;
};

struct LbCounts {
    std::uint64_t keogh = 0;
    std::uint64_t lbs = 0;
    std::uint64_t lbg = 0;
    std::uint64_t lbg_k = 0;

    std::uint64_t total() const noexcept { return keogh + lbs + lbg + lbg_k; }
};

struct QueryResult {
    std::vector<Hit> hits; // ascending by (distance, id), rooted per params
    AccessStats stats;
    std::uint64_t dtw_evaluations = 0;
    LbCounts lb_evaluations;
};

/// Bounded best-so-far set of capacity k over unrooted distances. The pruning
/// threshold is the current k-th best distance, +infinity while underfull;
/// it never increases over a query's lifetime.
class BestSoFar {
public:
    explicit BestSoFar(std::size_t k);

    bool full() const noexcept { return entries_.size() >= capacity_; }
    double threshold() const noexcept;
    void offer(SeqId id, double unrooted_distance);

    std::vector<Hit> finalize(const DistanceParams& params) const;

private:
    std::size_t capacity_;
    std::vector<std::pair<double, SeqId>> entries_; // max-heap, worst on top
};

/// Exact top-k via the multiresolution group bound: a coarse pass orders the
/// envelope records, refinement down the ladder prunes whole pages, and the
/// survivors' candidates are filtered by an online finest-ladder segment
/// bound before the full distance runs.
QueryResult topk_lbg(const TwistIndex& idx, const TimeSeries& q, std::size_t k);

/// Exact top-k via the constraint-expanded group bound: one envelope pass,
/// pages visited in ascending bound order, termination once the queue is full
/// and the next bound exceeds the threshold.
QueryResult topk_lbgk(const TwistIndex& idx, const TimeSeries& q, std::size_t k);

/// All sequences with distance <= epsilon (rooted domain), via the
/// constraint-expanded flow with a fixed threshold and unbounded capacity.
QueryResult range_query(const TwistIndex& idx, const TimeSeries& q, double epsilon);

struct ScanOptions {
    bool lb_keogh_filter = true;
    bool early_abandon = true;
};

/// Page-by-page scan of the whole index. With both options off this is the
/// pure brute-force oracle.
QueryResult sequential_scan(const TwistIndex& idx, const TimeSeries& q, std::size_t k,
                            const ScanOptions& options = {});

/// Scan over a raw dataset held in one sequential file (beta = dataset size,
/// delta = 1).
QueryResult sequential_scan(const std::vector<TimeSeries>& dataset, const TimeSeries& q,
                            const GlobalConstraint& r, const DistanceParams& params,
                            std::size_t k, const ScanOptions& options = {});

} // namespace twist
