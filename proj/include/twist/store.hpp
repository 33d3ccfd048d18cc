#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "twist/core.hpp"
#include "twist/lbounds.hpp"

namespace twist {

using PageId = std::uint32_t;

enum class DeletionPolicy { Eager, Lazy };

/// One sequential page: an ordered group of sequences read front to back.
struct DsfPage {
    PageId page_id = 0;
    std::vector<TimeSeries> sequences;

    std::size_t size() const noexcept { return sequences.size(); }
};

/// One index entry: the page pointer plus the group envelope over its members.
struct EsfRecord {
    PageId page_id = 0;
    GroupEnvelope envelope;
};

struct IndexConfig {
    std::size_t n = 0;
    std::size_t max_page_size = 128;
    DistanceParams params;
    std::vector<std::size_t> ladder;       // strictly decreasing segment sizes
    GlobalConstraint constraint{std::vector<std::uint32_t>{}};
    DeletionPolicy deletion_policy = DeletionPolicy::Eager;
    std::uint64_t split_seed = 0;

    void validate() const;
};

/// Per-query access counters. esf_envelope_reads counts one pass over the
/// envelope file; the page-access model applies the per-method pass
/// multiplier, so queries record a single pass regardless of method.
struct AccessStats {
    std::uint64_t esf_envelope_reads = 0;      // alpha
    std::uint64_t candidate_sequences_read = 0; // beta
    std::uint64_t dsf_random_accesses = 0;      // delta

    void reset() noexcept { *this = AccessStats{}; }
};

enum class AccessMode { Lbg, LbgK };

/// Modeled page accesses: (passes * alpha + beta) / SF + delta, with two
/// envelope passes for the multiresolution method and one for the
/// constraint-expanded method.
double page_access_count(const AccessStats& stats, double speedup_factor, AccessMode mode);

// --- On-disk layout -------------------------------------------------------
//
// All integers and doubles are little-endian, fixed width.
//
// DSF page file  "page_<id>.dsf":
//   magic "TWDS" | version u16 | n u32 | count u32
//   | count*n float64 values | count u64 sequence ids
// ESF file  "index.esf":
//   magic "TWES" | version u16 | n u32 | record count u32
//   | per record: page_id u32 | n float64 uppers | n float64 lowers
//                | member_count u32
// Dataset file (same payload as a DSF page, standalone):
//   magic "TWDT" | version u16 | n u32 | count u32 | values | ids
// Manifest "manifest.txt": key=value lines for IndexConfig.

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kDsfHeaderBytes = 14;
inline constexpr std::size_t kEsfHeaderBytes = 14;
inline constexpr std::size_t kEsfRecordFixedBytes = 8; // page_id + member_count

std::filesystem::path dsf_path(const std::filesystem::path& dir, PageId id);
std::filesystem::path esf_path(const std::filesystem::path& dir);
std::filesystem::path manifest_path(const std::filesystem::path& dir);

void write_dsf(const std::filesystem::path& dir, const DsfPage& page);
DsfPage read_dsf(const std::filesystem::path& dir, PageId id);
/// Sequential page read with access accounting: beta += count, delta += 1.
DsfPage read_dsf_sequential(const std::filesystem::path& dir, PageId id, AccessStats& stats);
void erase_dsf(const std::filesystem::path& dir, PageId id);

void write_esf(const std::filesystem::path& dir, const std::vector<EsfRecord>& records,
               std::size_t n);
std::vector<EsfRecord> load_esf(const std::filesystem::path& dir);
/// One counted pass: esf_envelope_reads += record count.
std::vector<EsfRecord> load_esf(const std::filesystem::path& dir, AccessStats& stats);

void write_manifest(const std::filesystem::path& dir, const IndexConfig& config);
IndexConfig read_manifest(const std::filesystem::path& dir);

void write_dataset(const std::filesystem::path& file, const std::vector<TimeSeries>& data);
std::vector<TimeSeries> read_dataset(const std::filesystem::path& file);

// In-memory encodings, used by the file writers and by integrity audits.
std::vector<std::byte> encode_dsf(const DsfPage& page);
std::vector<std::byte> encode_esf(const std::vector<EsfRecord>& records, std::size_t n);
std::string encode_manifest(const IndexConfig& config);

std::uint64_t esf_file_bytes(const std::filesystem::path& dir);
std::uint64_t dsf_total_bytes(const std::filesystem::path& dir,
                              const std::vector<EsfRecord>& records);

} // namespace twist
