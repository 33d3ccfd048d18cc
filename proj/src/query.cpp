#include "twist/query.hpp"

#include <algorithm>
#include <string>

namespace twist {

namespace {

// Worse = larger (distance, id) lexicographically; ids break distance ties so
// results are deterministic.
bool entry_less(const std::pair<double, SeqId>& a, const std::pair<double, SeqId>& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
}

void sort_hits(std::vector<Hit>& hits) {
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    });
}

struct RecordBound {
    double bound = 0.0;
    const EsfRecord* record = nullptr;
};

void sort_bounds(std::vector<RecordBound>& bounds) {
    std::sort(bounds.begin(), bounds.end(), [](const RecordBound& a, const RecordBound& b) {
        return a.bound < b.bound ||
               (a.bound == b.bound && a.record->page_id < b.record->page_id);
    });
}

void check_query(const TwistIndex& idx, const TimeSeries& q, std::size_t k) {
    if (k < 1) throw_invalid("k must be at least 1");
    if (q.length() != idx.config().n) {
        throw_invalid("query length " + std::to_string(q.length()) +
                      " does not match index length " + std::to_string(idx.config().n));
    }
}

} // namespace

BestSoFar::BestSoFar(std::size_t k) : capacity_(k) {
    if (k < 1) throw_invalid("k must be at least 1");
}

double BestSoFar::threshold() const noexcept {
    return full() ? entries_.front().first : kInfinity;
}

void BestSoFar::offer(SeqId id, double unrooted_distance) {
    const std::pair<double, SeqId> entry{unrooted_distance, id};
    if (!full()) {
        entries_.push_back(entry);
        std::push_heap(entries_.begin(), entries_.end(), entry_less);
        return;
    }
    if (entry_less(entry, entries_.front())) {
        std::pop_heap(entries_.begin(), entries_.end(), entry_less);
        entries_.back() = entry;
        std::push_heap(entries_.begin(), entries_.end(), entry_less);
    }
}

std::vector<Hit> BestSoFar::finalize(const DistanceParams& params) const {
    std::vector<Hit> hits;
    hits.reserve(entries_.size());
    for (const auto& [distance, id] : entries_) {
        hits.push_back(Hit{id, finalize_distance(distance, params)});
    }
    sort_hits(hits);
    return hits;
}

QueryResult topk_lbg(const TwistIndex& idx, const TimeSeries& q, std::size_t k) {
    check_query(idx, q, k);
    QueryResult result;
    const auto& esf = idx.esf();
    if (esf.empty()) return result;

    const IndexConfig& config = idx.config();
    const int p = config.params.p;
    result.stats.esf_envelope_reads += esf.size();

    std::vector<SegmentedSequence> q_segs;
    q_segs.reserve(config.ladder.size());
    for (std::size_t t : config.ladder) q_segs.push_back(segment(q, t));
    const SegmentedSequence& q_finest = q_segs.back();

    // Coarsest-level bound for every record fixes the visiting order.
    std::vector<RecordBound> order;
    order.reserve(esf.size());
    for (const EsfRecord& rec : esf) {
        const double bound =
            lbg_unrooted(q_segs.front(), segment_group_envelope(rec.envelope, config.ladder.front()), p);
        ++result.lb_evaluations.lbg;
        order.push_back(RecordBound{bound, &rec});
    }
    sort_bounds(order);

    BestSoFar best(k);
    for (const RecordBound& rb : order) {
        // Records come in ascending coarse-bound order and the threshold only
        // tightens, so the first miss prunes everything after it.
        if (rb.bound > best.threshold()) break;

        bool pruned = false;
        for (std::size_t level = 1; level < config.ladder.size(); ++level) {
            const double bound = lbg_unrooted(
                q_segs[level], segment_group_envelope(rb.record->envelope, config.ladder[level]),
                p, best.threshold());
            ++result.lb_evaluations.lbg;
            if (bound > best.threshold()) {
                pruned = true;
                break;
            }
        }
        if (pruned) continue;

        const DsfPage page = idx.fetch_page(rb.record->page_id, result.stats);
        for (const TimeSeries& c : page.sequences) {
            // Candidate segments are generated online; nothing per-candidate
            // is stored in the index.
            const double lb =
                lbs_unrooted(q_finest, segment(c, q_finest.segment_size), p, best.threshold());
            ++result.lb_evaluations.lbs;
            if (lb > best.threshold()) continue;
            const double d =
                dtw_unrooted(q.values, c.values, config.constraint, p, best.threshold());
            ++result.dtw_evaluations;
            best.offer(c.id, d);
        }
    }
    result.hits = best.finalize(config.params);
    return result;
}

QueryResult topk_lbgk(const TwistIndex& idx, const TimeSeries& q, std::size_t k) {
    check_query(idx, q, k);
    QueryResult result;
    const auto& esf = idx.esf();
    if (esf.empty()) return result;

    const IndexConfig& config = idx.config();
    const int p = config.params.p;
    result.stats.esf_envelope_reads += esf.size();

    const QueryEnvelope q_env = build_query_envelope(q, config.constraint);

    std::vector<RecordBound> order;
    order.reserve(esf.size());
    for (const EsfRecord& rec : esf) {
        const auto egc = expand_envelope_by_constraint(rec.envelope, config.constraint);
        order.push_back(RecordBound{lbg_k_unrooted(q.values, egc, p), &rec});
        ++result.lb_evaluations.lbg_k;
    }
    sort_bounds(order);

    BestSoFar best(k);
    for (const RecordBound& rb : order) {
        if (best.full() && rb.bound > best.threshold()) break;
        const DsfPage page = idx.fetch_page(rb.record->page_id, result.stats);
        for (const TimeSeries& c : page.sequences) {
            const double lb = lb_keogh_unrooted(q_env, c.values, p, best.threshold());
            ++result.lb_evaluations.keogh;
            if (lb > best.threshold()) continue;
            const double d =
                dtw_unrooted(q.values, c.values, config.constraint, p, best.threshold());
            ++result.dtw_evaluations;
            best.offer(c.id, d);
        }
    }
    result.hits = best.finalize(config.params);
    return result;
}

QueryResult range_query(const TwistIndex& idx, const TimeSeries& q, double epsilon) {
    check_query(idx, q, 1);
    if (!(epsilon >= 0.0)) throw_invalid("epsilon must be non-negative");
    QueryResult result;
    const auto& esf = idx.esf();
    if (esf.empty()) return result;

    const IndexConfig& config = idx.config();
    const DistanceParams& params = config.params;
    const int p = params.p;
    result.stats.esf_envelope_reads += esf.size();

    const QueryEnvelope q_env = build_query_envelope(q, config.constraint);

    // Comparisons run in the rooted domain so the epsilon contract is exact
    // at the API boundary.
    std::vector<RecordBound> order;
    order.reserve(esf.size());
    for (const EsfRecord& rec : esf) {
        const auto egc = expand_envelope_by_constraint(rec.envelope, config.constraint);
        order.push_back(
            RecordBound{finalize_distance(lbg_k_unrooted(q.values, egc, p), params), &rec});
        ++result.lb_evaluations.lbg_k;
    }
    sort_bounds(order);

    for (const RecordBound& rb : order) {
        if (rb.bound > epsilon) break;
        const DsfPage page = idx.fetch_page(rb.record->page_id, result.stats);
        for (const TimeSeries& c : page.sequences) {
            const double lb = finalize_distance(lb_keogh_unrooted(q_env, c.values, p), params);
            ++result.lb_evaluations.keogh;
            if (lb > epsilon) continue;
            const double d =
                finalize_distance(dtw_unrooted(q.values, c.values, config.constraint, p), params);
            ++result.dtw_evaluations;
            if (d <= epsilon) result.hits.push_back(Hit{c.id, d});
        }
    }
    sort_hits(result.hits);
    return result;
}

namespace {

QueryResult scan_candidates(
    const std::vector<const TimeSeries*>& candidates, const TimeSeries& q,
    const GlobalConstraint& r, const DistanceParams& params, std::size_t k,
    const ScanOptions& options, AccessStats stats) {
    QueryResult result;
    result.stats = stats;
    const int p = params.p;

    QueryEnvelope q_env;
    if (options.lb_keogh_filter) q_env = build_query_envelope(q, r);

    BestSoFar best(k);
    for (const TimeSeries* c : candidates) {
        if (options.lb_keogh_filter) {
            const double abandon_lb = options.early_abandon ? best.threshold() : kInfinity;
            const double lb = lb_keogh_unrooted(q_env, c->values, p, abandon_lb);
            ++result.lb_evaluations.keogh;
            if (lb > best.threshold()) continue;
        }
        const double abandon = options.early_abandon ? best.threshold() : kInfinity;
        const double d = dtw_unrooted(q.values, c->values, r, p, abandon);
        ++result.dtw_evaluations;
        best.offer(c->id, d);
    }
    result.hits = best.finalize(params);
    return result;
}

} // namespace

QueryResult sequential_scan(const TwistIndex& idx, const TimeSeries& q, std::size_t k,
                            const ScanOptions& options) {
    check_query(idx, q, k);
    AccessStats stats;
    std::vector<DsfPage> pages;
    pages.reserve(idx.page_count());
    for (const EsfRecord& rec : idx.esf()) pages.push_back(idx.fetch_page(rec.page_id, stats));
    std::vector<const TimeSeries*> candidates;
    for (const DsfPage& page : pages) {
        for (const TimeSeries& s : page.sequences) candidates.push_back(&s);
    }
    return scan_candidates(candidates, q, idx.config().constraint, idx.config().params, k,
                           options, stats);
}

QueryResult sequential_scan(const std::vector<TimeSeries>& dataset, const TimeSeries& q,
                            const GlobalConstraint& r, const DistanceParams& params,
                            std::size_t k, const ScanOptions& options) {
    if (k < 1) throw_invalid("k must be at least 1");
    AccessStats stats;
    if (!dataset.empty()) {
        stats.candidate_sequences_read = dataset.size();
        stats.dsf_random_accesses = 1;
    }
    std::vector<const TimeSeries*> candidates;
    candidates.reserve(dataset.size());
    for (const TimeSeries& s : dataset) candidates.push_back(&s);
    return scan_candidates(candidates, q, r, params, k, options, stats);
}

} // namespace twist
