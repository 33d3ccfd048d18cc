#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <vector>

#include "twist/query.hpp"

namespace twist {

/// Standard normal draws via the Marsaglia polar method over mt19937_64,
/// so streams replay identically everywhere for a given seed.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double next();

private:
    double uniform_pm1();

    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

enum class RwModel { Rw1, Rw2 };

struct GeneratorSpec {
    RwModel model = RwModel::Rw1;
    std::size_t count = 1;
    std::size_t length = 2;
    std::uint64_t seed = 0;
};

TimeSeries z_normalize(const TimeSeries& s);

/// Seeded random-walk dataset (first-order or second-order recurrence),
/// Z-normalized, ids 0..count-1.
std::vector<TimeSeries> generate(const GeneratorSpec& spec);

/// Well-separated bundles: each group is a Z-normalized first-order walk and
/// members perturb it pointwise with noise_sigma * N(0,1). Emitted group by
/// group with sequential ids.
std::vector<TimeSeries> make_clustered_dataset(std::size_t groups,
                                               std::size_t count,
                                               std::size_t length,
                                               double noise_sigma,
                                               std::uint64_t seed);

struct BenchConfig {
    std::vector<RwModel> models{RwModel::Rw1};
    std::vector<std::size_t> counts{1024, 4096, 16384};
    std::vector<std::size_t> lengths{128, 256, 512};
    std::vector<double> band_fractions{0.05, 0.10, 0.20};
    std::vector<std::size_t> ks{1, 5, 10};
    std::vector<std::size_t> page_sizes{16, 64, 128};

    // Center point held fixed while one axis varies.
    std::size_t default_count = 4096;
    std::size_t default_length = 256;
    double default_band = 0.10;
    std::size_t default_k = 1;
    std::size_t default_page_size = 128;

    std::size_t query_count = 10;
    std::uint64_t seed = 42;
    std::filesystem::path work_dir; // empty = std temp dir
};

struct BenchRow {
    std::string axis;       // which parameter this point varies
    RwModel model = RwModel::Rw1;
    std::size_t count = 0;
    std::size_t length = 0;
    double band = 0.0;
    std::size_t k = 0;
    std::size_t page_size = 0;
    std::string method;     // twist-lbg | twist-lbgk | seqscan-lbkeogh
    std::size_t query_id = 0;
    double wall_ms = 0.0;
    std::uint64_t dtw_evaluations = 0;
    std::uint64_t lb_evaluations = 0;
    std::uint64_t beta = 0;
    std::uint64_t delta = 0;
    double eta_sf5 = 0.0;
    double eta_sf10 = 0.0;
    std::uint64_t index_bytes = 0;
    std::uint64_t data_bytes = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    // Build/commit wall time per constructed index, reported apart from the
    // per-query times.
    std::vector<std::pair<std::string, double>> build_notes;
};

/// Runs every axis point of the config; each query is cross-checked against
/// the brute-force oracle and a mismatch aborts the run with the offending
/// case serialized.
BenchReport run_benchmark(const BenchConfig& config);

void write_report_csv(std::ostream& out, const BenchReport& report);

} // namespace twist
