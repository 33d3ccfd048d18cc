#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "twist/store.hpp"

namespace twist {

/// Envelope-growth cost of inserting c into a page with hull eg: out-of-hull
/// points are charged against the opposite bound. Unrooted; the root cannot
/// change the argmin.
double insertion_cost(const GroupEnvelope& eg, const TimeSeries& c, int p);

GroupEnvelope create_envelope(const DsfPage& page);
GroupEnvelope update_envelope(GroupEnvelope eg, const TimeSeries& c);

/// Partitions a page into two via 2-means on raw values (Euclidean),
/// deterministically seeded with the farthest member pair. Both outputs are
/// non-empty; an all-identical page falls back to balanced halving in id
/// order. Fresh page ids are assigned by the caller.
std::pair<DsfPage, DsfPage> split_dsf(const DsfPage& page, PageId x_id, PageId y_id);

/// The grouped sequential structure: an envelope list (ESF) over a set of
/// sequential pages (DSFs). Mutations are single-writer; queries read a
/// committed snapshot.
class TwistIndex {
public:
    static TwistIndex create(IndexConfig config);
    /// Sequential insertion of the dataset in order; rejects duplicate ids.
    static TwistIndex bulk_build(IndexConfig config, const std::vector<TimeSeries>& dataset);
    /// Loads manifest and ESF; pages are pulled from disk on demand.
    static TwistIndex open(const std::filesystem::path& dir);

    void insert(const TimeSeries& c);
    void erase(SeqId id, DeletionPolicy policy);
    void erase(SeqId id) { erase(id, config_.deletion_policy); }

    /// Writes manifest, ESF, and all changed pages under dir.
    void commit(const std::filesystem::path& dir);

    const IndexConfig& config() const noexcept { return config_; }
    const std::vector<EsfRecord>& esf() const noexcept { return esf_; }
    std::size_t page_count() const noexcept { return esf_.size(); }
    std::size_t sequence_count() const;
    bool contains(SeqId id) const;

    const DsfPage& page(PageId id) const;
    /// Page fetch with access accounting (beta += count, delta += 1); reads
    /// from disk when the page is not resident.
    DsfPage fetch_page(PageId id, AccessStats& stats) const;

    std::vector<PageId> page_ids() const;

private:
    TwistIndex() : config_{} {}

    DsfPage& ensure_loaded(PageId id);
    const DsfPage& ensure_loaded_const(PageId id) const;
    EsfRecord& record_for(PageId id);
    std::optional<PageId> page_holding(SeqId id) const;
    void load_all_pages() const;

    IndexConfig config_;
    std::vector<EsfRecord> esf_;           // kept in ascending page_id order
    mutable std::map<PageId, DsfPage> pages_;
    std::set<PageId> dirty_;
    std::set<PageId> removed_;
    std::set<SeqId> ids_;
    PageId next_page_id_ = 0;
    std::filesystem::path dir_;            // empty until opened or committed
};

/// Structural audit: partition (every id in exactly one page), envelope
/// containment, and byte-exact file round-trips when dir is attached.
struct VerifyReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

VerifyReport verify_index(const std::filesystem::path& dir);

} // namespace twist
