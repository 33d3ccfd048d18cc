#include "twist/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

namespace twist {

double insertion_cost(const GroupEnvelope& eg, const TimeSeries& c, int p) {
    if (eg.length() != c.length()) {
        throw_invalid("insertion cost: envelope length " + std::to_string(eg.length()) +
                      " vs sequence length " + std::to_string(c.length()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < c.length(); ++i) {
        const double v = c.values[i];
        if (v > eg.upper[i]) {
            sum += pow_p(v - eg.lower[i], p);
        } else if (v < eg.lower[i]) {
            sum += pow_p(eg.upper[i] - v, p);
        }
    }
    return sum;
}

GroupEnvelope create_envelope(const DsfPage& page) {
    return build_group_envelope(page.sequences);
}

GroupEnvelope update_envelope(GroupEnvelope eg, const TimeSeries& c) {
    if (eg.length() != c.length()) {
        throw_invalid("envelope update: length mismatch");
    }
    for (std::size_t i = 0; i < c.length(); ++i) {
        eg.upper[i] = std::max(eg.upper[i], c.values[i]);
        eg.lower[i] = std::min(eg.lower[i], c.values[i]);
    }
    ++eg.member_count;
    return eg;
}

namespace {

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

// Farthest pair under Euclidean distance; first pair in scan order wins ties.
std::pair<std::size_t, std::size_t> farthest_pair(const std::vector<TimeSeries>& members) {
    std::size_t best_a = 0, best_b = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const double d = squared_euclidean(members[i].values, members[j].values);
            if (d > best) {
                best = d;
                best_a = i;
                best_b = j;
            }
        }
    }
    return {best_a, best_b};
}

std::pair<DsfPage, DsfPage> balanced_halving(const DsfPage& page, PageId x_id, PageId y_id) {
    std::vector<std::size_t> order(page.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return page.sequences[a].id < page.sequences[b].id;
    });
    DsfPage x{x_id, {}};
    DsfPage y{y_id, {}};
    const std::size_t half = (page.size() + 1) / 2;
    for (std::size_t k = 0; k < order.size(); ++k) {
        (k < half ? x : y).sequences.push_back(page.sequences[order[k]]);
    }
    return {std::move(x), std::move(y)};
}

} // namespace

std::pair<DsfPage, DsfPage> split_dsf(const DsfPage& page, PageId x_id, PageId y_id) {
    const std::size_t m = page.size();
    if (m < 2) throw_invalid("cannot split a page with fewer than two sequences");

    const auto [seed_a, seed_b] = farthest_pair(page.sequences);
    if (squared_euclidean(page.sequences[seed_a].values, page.sequences[seed_b].values) == 0.0) {
        return balanced_halving(page, x_id, y_id);
    }

    const std::size_t n = page.sequences.front().length();
    std::vector<double> centroid_x = page.sequences[seed_a].values;
    std::vector<double> centroid_y = page.sequences[seed_b].values;
    std::vector<bool> in_x(m, false);

    constexpr int kMaxIterations = 50;
    // Initial assignment to the nearer seed; ties go to x.
    for (std::size_t i = 0; i < m; ++i) {
        in_x[i] = squared_euclidean(page.sequences[i].values, centroid_x) <=
                  squared_euclidean(page.sequences[i].values, centroid_y);
    }

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Recompute centroids.
        std::vector<double> sum_x(n, 0.0), sum_y(n, 0.0);
        std::size_t count_x = 0, count_y = 0;
        for (std::size_t i = 0; i < m; ++i) {
            auto& sum = in_x[i] ? sum_x : sum_y;
            (in_x[i] ? count_x : count_y) += 1;
            for (std::size_t d = 0; d < n; ++d) sum[d] += page.sequences[i].values[d];
        }
        // Empty-cluster repair: donate the member farthest from the surviving
        // centroid.
        if (count_x == 0 || count_y == 0) {
            const bool x_empty = count_x == 0;
            const auto& centroid = x_empty ? sum_y : sum_x;
            const double scale = 1.0 / static_cast<double>(x_empty ? count_y : count_x);
            std::size_t farthest = 0;
            double worst = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                double d = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double diff = page.sequences[i].values[k] - centroid[k] * scale;
                    d += diff * diff;
                }
                if (d > worst) {
                    worst = d;
                    farthest = i;
                }
            }
            in_x[farthest] = x_empty;
            continue;
        }
        for (std::size_t d = 0; d < n; ++d) {
            centroid_x[d] = sum_x[d] / static_cast<double>(count_x);
            centroid_y[d] = sum_y[d] / static_cast<double>(count_y);
        }
        // Reassign.
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            const bool to_x = squared_euclidean(page.sequences[i].values, centroid_x) <=
                              squared_euclidean(page.sequences[i].values, centroid_y);
            if (to_x != in_x[i]) {
                in_x[i] = to_x;
                changed = true;
            }
        }
        if (!changed) break;
    }

    DsfPage x{x_id, {}};
    DsfPage y{y_id, {}};
    for (std::size_t i = 0; i < m; ++i) {
        (in_x[i] ? x : y).sequences.push_back(page.sequences[i]);
    }
    if (x.sequences.empty() || y.sequences.empty()) {
        return balanced_halving(page, x_id, y_id);
    }
    return {std::move(x), std::move(y)};
}

TwistIndex TwistIndex::create(IndexConfig config) {
    config.validate();
    TwistIndex idx;
    idx.config_ = std::move(config);
    return idx;
}

TwistIndex TwistIndex::bulk_build(IndexConfig config, const std::vector<TimeSeries>& dataset) {
    TwistIndex idx = create(std::move(config));
    for (const TimeSeries& s : dataset) idx.insert(s);
    return idx;
}

TwistIndex TwistIndex::open(const std::filesystem::path& dir) {
    TwistIndex idx;
    idx.config_ = read_manifest(dir);
    idx.esf_ = load_esf(dir);
    idx.dir_ = dir;
    PageId next = 0;
    for (const auto& rec : idx.esf_) next = std::max(next, rec.page_id + 1);
    idx.next_page_id_ = next;
    // The id set is needed for duplicate checks; pages stay on disk until used.
    for (const auto& rec : idx.esf_) {
        const DsfPage page = read_dsf(dir, rec.page_id);
        for (const auto& s : page.sequences) idx.ids_.insert(s.id);
    }
    return idx;
}

DsfPage& TwistIndex::ensure_loaded(PageId id) {
    auto it = pages_.find(id);
    if (it != pages_.end()) return it->second;
    if (dir_.empty()) throw_not_found("page " + std::to_string(id) + " not resident");
    auto [inserted, ok] = pages_.emplace(id, read_dsf(dir_, id));
    return inserted->second;
}

const DsfPage& TwistIndex::ensure_loaded_const(PageId id) const {
    auto it = pages_.find(id);
    if (it != pages_.end()) return it->second;
    if (dir_.empty()) throw_not_found("page " + std::to_string(id) + " not resident");
    auto [inserted, ok] = pages_.emplace(id, read_dsf(dir_, id));
    return inserted->second;
}

EsfRecord& TwistIndex::record_for(PageId id) {
    auto it = std::find_if(esf_.begin(), esf_.end(),
                           [&](const EsfRecord& rec) { return rec.page_id == id; });
    if (it == esf_.end()) throw_not_found("no envelope record for page " + std::to_string(id));
    return *it;
}

void TwistIndex::insert(const TimeSeries& c) {
    if (c.length() != config_.n) {
        throw_invalid("sequence " + std::to_string(c.id) + " has length " +
                      std::to_string(c.length()) + ", index expects " +
                      std::to_string(config_.n));
    }
    for (double v : c.values) {
        if (!std::isfinite(v)) {
            throw_invalid("sequence " + std::to_string(c.id) + " contains non-finite values");
        }
    }
    if (ids_.contains(c.id)) {
        throw_invalid("sequence id " + std::to_string(c.id) + " already present");
    }

    if (esf_.empty()) {
        DsfPage page{next_page_id_++, {c}};
        esf_.push_back(EsfRecord{page.page_id, create_envelope(page)});
        dirty_.insert(page.page_id);
        pages_.emplace(page.page_id, std::move(page));
        ids_.insert(c.id);
        return;
    }

    // Scan every envelope for the minimum insertion cost; ties break to the
    // lowest page id (ESF is kept in ascending id order).
    double best_cost = kInfinity;
    PageId best_page = esf_.front().page_id;
    for (const EsfRecord& rec : esf_) {
        const double cost = insertion_cost(rec.envelope, c, config_.params.p);
        if (cost < best_cost) {
            best_cost = cost;
            best_page = rec.page_id;
        }
    }

    DsfPage& page = ensure_loaded(best_page);
    page.sequences.push_back(c);
    ids_.insert(c.id);

    if (page.size() > config_.max_page_size) {
        const PageId x_id = next_page_id_++;
        const PageId y_id = next_page_id_++;
        auto [x, y] = split_dsf(page, x_id, y_id);

        std::erase_if(esf_, [&](const EsfRecord& rec) { return rec.page_id == best_page; });
        pages_.erase(best_page);
        dirty_.erase(best_page);
        removed_.insert(best_page);

        esf_.push_back(EsfRecord{x_id, create_envelope(x)});
        esf_.push_back(EsfRecord{y_id, create_envelope(y)});
        std::sort(esf_.begin(), esf_.end(),
                  [](const EsfRecord& a, const EsfRecord& b) { return a.page_id < b.page_id; });
        dirty_.insert(x_id);
        dirty_.insert(y_id);
        pages_.emplace(x_id, std::move(x));
        pages_.emplace(y_id, std::move(y));
    } else {
        EsfRecord& rec = record_for(best_page);
        rec.envelope = update_envelope(std::move(rec.envelope), c);
        dirty_.insert(best_page);
    }
}

std::optional<PageId> TwistIndex::page_holding(SeqId id) const {
    for (const EsfRecord& rec : esf_) {
        const DsfPage& page = ensure_loaded_const(rec.page_id);
        for (const TimeSeries& s : page.sequences) {
            if (s.id == id) return rec.page_id;
        }
    }
    return std::nullopt;
}

void TwistIndex::erase(SeqId id, DeletionPolicy policy) {
    if (!ids_.contains(id)) {
        throw_not_found("sequence id " + std::to_string(id) + " not in index");
    }
    const auto holder = page_holding(id);
    if (!holder) throw_invariant("id set and page contents disagree for " + std::to_string(id));

    DsfPage& page = ensure_loaded(*holder);
    std::erase_if(page.sequences, [&](const TimeSeries& s) { return s.id == id; });
    ids_.erase(id);

    if (page.sequences.empty()) {
        std::erase_if(esf_, [&](const EsfRecord& rec) { return rec.page_id == *holder; });
        pages_.erase(*holder);
        dirty_.erase(*holder);
        removed_.insert(*holder);
        return;
    }
    dirty_.insert(*holder);
    if (policy == DeletionPolicy::Eager) {
        record_for(*holder).envelope = create_envelope(page);
    }
    // Lazy deletion leaves the envelope untouched: containment still holds,
    // the hull is just looser than necessary.
}

void TwistIndex::commit(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const bool relocating = dir_.empty() || !std::filesystem::equivalent(dir, dir_);
    if (relocating) {
        // Everything must be written fresh at the new location.
        load_all_pages();
        for (const auto& rec : esf_) dirty_.insert(rec.page_id);
    }
    for (PageId id : removed_) {
        std::error_code ec;
        std::filesystem::remove(dsf_path(dir, id), ec);
    }
    removed_.clear();
    for (PageId id : dirty_) write_dsf(dir, pages_.at(id));
    dirty_.clear();
    write_esf(dir, esf_, config_.n);
    write_manifest(dir, config_);
    dir_ = dir;
}

void TwistIndex::load_all_pages() const {
    for (const auto& rec : esf_) ensure_loaded_const(rec.page_id);
}

std::size_t TwistIndex::sequence_count() const { return ids_.size(); }

bool TwistIndex::contains(SeqId id) const { return ids_.contains(id); }

const DsfPage& TwistIndex::page(PageId id) const { return ensure_loaded_const(id); }

DsfPage TwistIndex::fetch_page(PageId id, AccessStats& stats) const {
    if (!dir_.empty() && !pages_.contains(id)) {
        return read_dsf_sequential(dir_, id, stats);
    }
    const DsfPage& page = ensure_loaded_const(id);
    stats.candidate_sequences_read += page.size();
    stats.dsf_random_accesses += 1;
    return page;
}

std::vector<PageId> TwistIndex::page_ids() const {
    std::vector<PageId> ids;
    ids.reserve(esf_.size());
    for (const auto& rec : esf_) ids.push_back(rec.page_id);
    return ids;
}

VerifyReport verify_index(const std::filesystem::path& dir) {
    VerifyReport report;
    auto complain = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    IndexConfig config;
    std::vector<EsfRecord> records;
    try {
        config = read_manifest(dir);
        records = load_esf(dir);
    } catch (const Error& e) {
        complain(e.what());
        return report;
    }

    std::set<SeqId> seen;
    for (const auto& rec : records) {
        DsfPage page;
        try {
            page = read_dsf(dir, rec.page_id);
        } catch (const Error& e) {
            complain(e.what());
            continue;
        }
        if (page.sequences.empty()) {
            complain("page " + std::to_string(rec.page_id) + " is empty");
        }
        if (page.size() > config.max_page_size) {
            complain("page " + std::to_string(rec.page_id) + " exceeds max page size");
        }
        for (const auto& s : page.sequences) {
            if (s.length() != config.n) {
                complain("sequence " + std::to_string(s.id) + " has wrong length");
            }
            if (!seen.insert(s.id).second) {
                complain("sequence id " + std::to_string(s.id) + " appears in multiple pages");
            }
            if (!rec.envelope.contains(s.values)) {
                complain("envelope of page " + std::to_string(rec.page_id) +
                         " does not contain sequence " + std::to_string(s.id));
            }
        }
        // Byte-exact round trip of the page file.
        const auto encoded = encode_dsf(page);
        std::ifstream in(dsf_path(dir, rec.page_id), std::ios::binary | std::ios::ate);
        const auto size = static_cast<std::size_t>(in.tellg());
        in.seekg(0);
        std::vector<char> raw(size);
        in.read(raw.data(), static_cast<std::streamsize>(size));
        if (size != encoded.size() ||
            std::memcmp(raw.data(), encoded.data(), size) != 0) {
            complain("page " + std::to_string(rec.page_id) + " fails byte round-trip");
        }
    }

    // ESF file must round-trip byte-exactly as well.
    {
        const auto encoded = encode_esf(records, config.n);
        std::ifstream in(esf_path(dir), std::ios::binary | std::ios::ate);
        const auto size = static_cast<std::size_t>(in.tellg());
        in.seekg(0);
        std::vector<char> raw(size);
        in.read(raw.data(), static_cast<std::streamsize>(size));
        if (size != encoded.size() || std::memcmp(raw.data(), encoded.data(), size) != 0) {
            complain("envelope file fails byte round-trip");
        }
    }

    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].page_id <= records[i - 1].page_id) {
            complain("ESF records are not in ascending page order");
        }
    }
    return report;
}

} // namespace twist
