#include "twist/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

namespace twist {

double NormalSampler::uniform_pm1() {
    // 53-bit mantissa draw in [-1, 1).
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

double NormalSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double x, y, s;
    do {
        x = uniform_pm1();
        y = uniform_pm1();
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * scale;
    has_spare_ = true;
    return x * scale;
}

TimeSeries z_normalize(const TimeSeries& s) {
    if (s.length() == 0) throw_invalid("cannot normalize an empty sequence");
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(s.length());
    double var = 0.0;
    for (double v : s.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(s.length()); // population variance
    const double std_dev = std::sqrt(var);

    TimeSeries out;
    out.id = s.id;
    out.values.resize(s.length());
    if (std_dev == 0.0) {
        // Constant input maps to all zeros.
        return out;
    }
    for (std::size_t i = 0; i < s.length(); ++i) {
        out.values[i] = (s.values[i] - mean) / std_dev;
    }
    return out;
}

std::vector<TimeSeries> generate(const GeneratorSpec& spec) {
    if (spec.count < 1) throw_invalid("generator count must be at least 1");
    if (spec.length < 2) throw_invalid("generator length must be at least 2");

    NormalSampler sampler(spec.seed);
    std::vector<TimeSeries> dataset;
    dataset.reserve(spec.count);
    for (std::size_t s = 0; s < spec.count; ++s) {
        TimeSeries raw;
        raw.id = s;
        raw.values.resize(spec.length);
        if (spec.model == RwModel::Rw1) {
            raw.values[0] = sampler.next();
            for (std::size_t i = 1; i < spec.length; ++i) {
                raw.values[i] = raw.values[i - 1] + sampler.next();
            }
        } else {
            raw.values[0] = sampler.next();
            raw.values[1] = sampler.next();
            for (std::size_t i = 2; i < spec.length; ++i) {
                raw.values[i] = 2.0 * raw.values[i - 1] - raw.values[i - 2] + sampler.next();
            }
        }
        dataset.push_back(z_normalize(raw));
    }
    return dataset;
}

std::vector<TimeSeries> make_clustered_dataset(std::size_t groups, std::size_t count,
                                               std::size_t length, double noise_sigma,
                                               std::uint64_t seed) {
    if (groups < 1 || count < groups) throw_invalid("need at least one member per group");
    // Groups separate in level as well as shape, so their hulls are disjoint.
    constexpr double kGroupSpacing = 8.0;
    NormalSampler sampler(seed);
    std::vector<TimeSeries> dataset;
    dataset.reserve(count);
    SeqId next_id = 0;
    const std::size_t base = count / groups;
    const std::size_t remainder = count % groups;
    for (std::size_t g = 0; g < groups; ++g) {
        TimeSeries center;
        center.values.resize(length);
        center.values[0] = sampler.next();
        for (std::size_t i = 1; i < length; ++i) {
            center.values[i] = center.values[i - 1] + sampler.next();
        }
        center = z_normalize(center);
        for (double& v : center.values) v += kGroupSpacing * static_cast<double>(g);
        const std::size_t members = base + (g < remainder ? 1 : 0);
        for (std::size_t m = 0; m < members; ++m) {
            TimeSeries s;
            s.id = next_id++;
            s.values.resize(length);
            for (std::size_t i = 0; i < length; ++i) {
                s.values[i] = center.values[i] + noise_sigma * sampler.next();
            }
            dataset.push_back(std::move(s));
        }
    }
    return dataset;
}

namespace {

const char* model_name(RwModel model) { return model == RwModel::Rw1 ? "rw1" : "rw2"; }

struct AxisPoint {
    std::string axis;
    RwModel model;
    std::size_t count;
    std::size_t length;
    double band;
    std::size_t k;
    std::size_t page_size;
};

std::string axis_key(const AxisPoint& pt) {
    std::ostringstream key;
    key << model_name(pt.model) << ":" << pt.count << ":" << pt.length << ":" << pt.band
        << ":" << pt.page_size;
    return key.str();
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count();
}

void require_matching_hits(const std::vector<Hit>& expected, const std::vector<Hit>& actual,
                           const std::string& method, std::size_t query_id) {
    bool ok = expected.size() == actual.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) {
        const double tol = 1e-9 * std::max(1.0, std::abs(expected[i].distance));
        ok = expected[i].id == actual[i].id &&
             std::abs(expected[i].distance - actual[i].distance) <= tol;
    }
    if (!ok) {
        std::ostringstream msg;
        msg << "exactness check failed for " << method << " on query " << query_id << ": expected";
        for (const Hit& h : expected) msg << " (" << h.id << "," << h.distance << ")";
        msg << " got";
        for (const Hit& h : actual) msg << " (" << h.id << "," << h.distance << ")";
        throw_invariant(msg.str());
    }
}

} // namespace

BenchReport run_benchmark(const BenchConfig& config) {
    BenchReport report;

    std::vector<AxisPoint> points;
    for (RwModel model : config.models) {
        const AxisPoint center{"count", model, config.default_count, config.default_length,
                               config.default_band, config.default_k, config.default_page_size};
        for (std::size_t c : config.counts) {
            AxisPoint pt = center;
            pt.axis = "count";
            pt.count = c;
            points.push_back(pt);
        }
        for (std::size_t l : config.lengths) {
            AxisPoint pt = center;
            pt.axis = "length";
            pt.length = l;
            points.push_back(pt);
        }
        for (double b : config.band_fractions) {
            AxisPoint pt = center;
            pt.axis = "band";
            pt.band = b;
            points.push_back(pt);
        }
        for (std::size_t k : config.ks) {
            AxisPoint pt = center;
            pt.axis = "k";
            pt.k = k;
            points.push_back(pt);
        }
        for (std::size_t a : config.page_sizes) {
            AxisPoint pt = center;
            pt.axis = "page_size";
            pt.page_size = a;
            points.push_back(pt);
        }
    }

    const std::filesystem::path work_root =
        config.work_dir.empty() ? std::filesystem::temp_directory_path() / "twist_bench"
                                : config.work_dir;
    std::filesystem::create_directories(work_root);

    // Indexes and datasets are cached across axis points that share them;
    // k-only changes reuse the same build.
    std::string built_key;
    std::optional<TwistIndex> index;
    std::vector<TimeSeries> queries;
    std::uint64_t index_bytes = 0;
    std::uint64_t data_bytes = 0;

    std::size_t point_no = 0;
    for (const AxisPoint& pt : points) {
        const std::string key = axis_key(pt);
        if (key != built_key) {
            GeneratorSpec data_spec{pt.model, pt.count, pt.length, config.seed};
            auto dataset = generate(data_spec);
            GeneratorSpec query_spec{pt.model, config.query_count, pt.length,
                                     config.seed + 0x9e3779b97f4a7c15ULL};
            queries = generate(query_spec);

            IndexConfig idx_config{
                .n = pt.length,
                .max_page_size = pt.page_size,
                .params = {},
                .ladder = default_ladder(pt.length),
                .constraint = GlobalConstraint::sakoe_chiba(pt.band, pt.length),
                .deletion_policy = DeletionPolicy::Eager,
                .split_seed = config.seed,
            };
            const auto build_start = std::chrono::steady_clock::now();
            index = TwistIndex::bulk_build(idx_config, dataset);
            const auto dir = work_root / ("point_" + std::to_string(point_no));
            index->commit(dir);
            report.build_notes.emplace_back(key, elapsed_ms(build_start));
            index_bytes = esf_file_bytes(dir);
            data_bytes = dsf_total_bytes(dir, index->esf());
            built_key = key;
        }
        ++point_no;

        for (std::size_t qi = 0; qi < queries.size(); ++qi) {
            const TimeSeries& q = queries[qi];

            // The oracle is the unfiltered scan; every method must agree with it.
            const QueryResult oracle =
                sequential_scan(*index, q, pt.k, ScanOptions{false, false});

            auto record = [&](const std::string& method, const QueryResult& r, double ms) {
                report.rows.push_back(BenchRow{
                    pt.axis, pt.model, pt.count, pt.length, pt.band, pt.k, pt.page_size,
                    method, qi, ms, r.dtw_evaluations, r.lb_evaluations.total(),
                    r.stats.candidate_sequences_read, r.stats.dsf_random_accesses,
                    page_access_count(r.stats, 5.0,
                                      method == "twist-lbg" ? AccessMode::Lbg : AccessMode::LbgK),
                    page_access_count(r.stats, 10.0,
                                      method == "twist-lbg" ? AccessMode::Lbg : AccessMode::LbgK),
                    index_bytes, data_bytes});
            };

            auto start = std::chrono::steady_clock::now();
            const QueryResult lbg_result = topk_lbg(*index, q, pt.k);
            const double lbg_ms = elapsed_ms(start);
            require_matching_hits(oracle.hits, lbg_result.hits, "twist-lbg", qi);
            record("twist-lbg", lbg_result, lbg_ms);

            start = std::chrono::steady_clock::now();
            const QueryResult lbgk_result = topk_lbgk(*index, q, pt.k);
            const double lbgk_ms = elapsed_ms(start);
            require_matching_hits(oracle.hits, lbgk_result.hits, "twist-lbgk", qi);
            record("twist-lbgk", lbgk_result, lbgk_ms);

            start = std::chrono::steady_clock::now();
            const QueryResult scan_result = sequential_scan(*index, q, pt.k);
            const double scan_ms = elapsed_ms(start);
            require_matching_hits(oracle.hits, scan_result.hits, "seqscan-lbkeogh", qi);
            record("seqscan-lbkeogh", scan_result, scan_ms);
        }
    }
    return report;
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
    out << "# rng=mt19937_64-polar\n";
    for (const auto& [key, build_ms] : report.build_notes) {
        out << "# build " << key << " build_ms=" << build_ms << "\n";
    }
    out << "axis,model,count,length,band,k,page_size,method,query_id,wall_ms,"
           "dtw_evals,lb_evals,beta,delta,eta_sf5,eta_sf10,index_bytes,data_bytes\n";

    // Wall times aggregate per (axis point, method), in first-seen order.
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    for (const BenchRow& row : report.rows) {
        std::ostringstream key;
        key << "axis=" << row.axis << " model=" << model_name(row.model)
            << " count=" << row.count << " length=" << row.length << " band=" << row.band
            << " k=" << row.k << " page_size=" << row.page_size << " method=" << row.method;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key.str(); });
        if (it == groups.end()) {
            groups.emplace_back(key.str(), std::vector<double>{});
            it = std::prev(groups.end());
        }
        it->second.push_back(row.wall_ms);

        out << row.axis << "," << model_name(row.model) << "," << row.count << ","
            << row.length << "," << row.band << "," << row.k << "," << row.page_size << ","
            << row.method << "," << row.query_id << "," << row.wall_ms << ","
            << row.dtw_evaluations << "," << row.lb_evaluations << "," << row.beta << ","
            << row.delta << "," << row.eta_sf5 << "," << row.eta_sf10 << ","
            << row.index_bytes << "," << row.data_bytes << "\n";
    }
    for (const auto& [key, samples] : groups) {
        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= static_cast<double>(samples.size());
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        const double median =
            sorted.size() % 2 == 1
                ? sorted[sorted.size() / 2]
                : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        out << "# summary " << key << " mean_ms=" << mean << " median_ms=" << median << "\n";
    }
}

} // namespace twist
