// Command-line surface for the TWIST engine: dataset generation, index
// build/maintenance, querying, benchmarking, and invariant audits.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twist/bench.hpp"
#include "twist/index.hpp"
#include "twist/query.hpp"

namespace {

// Exit codes: 0 success, 2 input error, 3 not found, 4 I/O, 5 invariant.
int exit_code(twist::ErrorKind kind) {
    switch (kind) {
        case twist::ErrorKind::InvalidInput: return 2;
        case twist::ErrorKind::NotFound: return 3;
        case twist::ErrorKind::Io: return 4;
        case twist::ErrorKind::InvariantViolation: return 5;
    }
    return 1;
}

twist::RwModel parse_model(const std::string& name) {
    if (name == "rw1") return twist::RwModel::Rw1;
    if (name == "rw2") return twist::RwModel::Rw2;
    twist::throw_invalid("unknown generator model '" + name + "' (expected rw1 or rw2)");
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoull(item));
        } catch (const std::exception&) {
            twist::throw_invalid(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) twist::throw_invalid(std::string("empty ") + what + " list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            twist::throw_invalid(std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    return out;
}

struct QueryCsvOptions {
    std::vector<double> sfs{5.0, 10.0};
};

void print_query_csv_header(std::ostream& out, const QueryCsvOptions& opts) {
    out << "query_id,rank,sequence_id,distance,dtw_evals,lb_evals,beta,delta";
    for (double sf : opts.sfs) out << ",eta_sf" << sf;
    out << "\n";
}

void print_query_csv(std::ostream& out, std::uint64_t query_id, const twist::QueryResult& result,
                     twist::AccessMode mode, const QueryCsvOptions& opts) {
    std::size_t rank = 1;
    for (const twist::Hit& hit : result.hits) {
        out << query_id << "," << rank++ << "," << hit.id << "," << hit.distance << ","
            << result.dtw_evaluations << "," << result.lb_evaluations.total() << ","
            << result.stats.candidate_sequences_read << ","
            << result.stats.dsf_random_accesses;
        for (double sf : opts.sfs) {
            out << "," << twist::page_access_count(result.stats, sf, mode);
        }
        out << "\n";
    }
}

int cmd_gen(const std::string& model, std::size_t count, std::size_t length,
            std::uint64_t seed, const std::string& out_path) {
    twist::GeneratorSpec spec{parse_model(model), count, length, seed};
    twist::write_dataset(out_path, twist::generate(spec));
    std::cerr << "wrote " << count << " sequences of length " << length << " to " << out_path
              << "\n";
    return 0;
}

int cmd_build(const std::string& dataset_path, const std::string& index_dir,
              std::size_t page_size, double band_pct, int p, std::uint64_t seed,
              const std::string& ladder_text) {
    const auto dataset = twist::read_dataset(dataset_path);
    if (dataset.empty()) twist::throw_invalid("dataset is empty");
    const std::size_t n = dataset.front().length();

    twist::IndexConfig config;
    config.n = n;
    config.max_page_size = page_size;
    config.params.p = p;
    config.ladder = ladder_text.empty() ? twist::default_ladder(n)
                                        : parse_size_list(ladder_text, "ladder");
    config.constraint = twist::GlobalConstraint::sakoe_chiba(band_pct / 100.0, n);
    config.split_seed = seed;

    auto index = twist::TwistIndex::bulk_build(config, dataset);
    index.commit(index_dir);
    std::cerr << "built index over " << dataset.size() << " sequences: " << index.page_count()
              << " pages in " << index_dir << "\n";
    return 0;
}

int cmd_insert(const std::string& index_dir, const std::string& input_path) {
    auto index = twist::TwistIndex::open(index_dir);
    const auto sequences = twist::read_dataset(input_path);
    for (const auto& s : sequences) index.insert(s);
    index.commit(index_dir);
    std::cerr << "inserted " << sequences.size() << " sequences\n";
    return 0;
}

int cmd_delete(const std::string& index_dir, std::uint64_t id, const std::string& policy) {
    auto index = twist::TwistIndex::open(index_dir);
    twist::DeletionPolicy dp;
    if (policy == "eager") {
        dp = twist::DeletionPolicy::Eager;
    } else if (policy == "lazy") {
        dp = twist::DeletionPolicy::Lazy;
    } else {
        twist::throw_invalid("unknown deletion policy '" + policy + "'");
    }
    index.erase(id, dp);
    index.commit(index_dir);
    std::cerr << "deleted sequence " << id << " (" << policy << ")\n";
    return 0;
}

int cmd_query(const std::string& index_dir, const std::string& query_path,
              const std::string& method, std::size_t k, double epsilon, bool has_epsilon,
              const std::string& sf_text) {
    if (method != "lbg" && method != "lbgk" && method != "scan") {
        twist::throw_invalid("unknown method '" + method + "' (expected lbg, lbgk, scan)");
    }
    if (has_epsilon && method == "lbg") {
        twist::throw_invalid("range queries support --method lbgk or scan");
    }
    const auto index = twist::TwistIndex::open(index_dir);
    const auto queries = twist::read_dataset(query_path);
    if (queries.empty()) twist::throw_invalid("query file is empty");

    QueryCsvOptions csv;
    if (!sf_text.empty()) {
        csv.sfs = parse_double_list(sf_text, "sf");
        if (csv.sfs.empty()) twist::throw_invalid("empty sf list");
    }
    print_query_csv_header(std::cout, csv);

    for (const auto& q : queries) {
        twist::QueryResult result;
        twist::AccessMode mode = twist::AccessMode::LbgK;
        if (has_epsilon) {
            if (method == "lbgk") {
                result = twist::range_query(index, q, epsilon);
            } else {
                // Oracle-style range: scan everything, keep distances <= epsilon.
                const auto scanned = twist::sequential_scan(
                    index, q, std::max<std::size_t>(index.sequence_count(), 1),
                    twist::ScanOptions{false, false});
                result = scanned;
                result.hits.clear();
                for (const auto& hit : scanned.hits) {
                    if (hit.distance <= epsilon) result.hits.push_back(hit);
                }
            }
        } else if (method == "lbg") {
            result = twist::topk_lbg(index, q, k);
            mode = twist::AccessMode::Lbg;
        } else if (method == "lbgk") {
            result = twist::topk_lbgk(index, q, k);
        } else if (method == "scan") {
            result = twist::sequential_scan(index, q, k);
        }
        print_query_csv(std::cout, q.id, result, mode, csv);
    }
    return 0;
}

int cmd_bench(const std::string& spec_path, const std::string& out_path,
              const std::string& work_dir) {
    twist::BenchConfig config;
    if (!work_dir.empty()) config.work_dir = work_dir;

    std::ifstream in(spec_path);
    if (!in) twist::throw_io("cannot open bench spec " + spec_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            twist::throw_invalid("bench spec line is not key=value: " + line);
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "models") {
            config.models.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) config.models.push_back(parse_model(item));
        } else if (key == "counts") {
            config.counts = parse_size_list(value, "counts");
        } else if (key == "lengths") {
            config.lengths = parse_size_list(value, "lengths");
        } else if (key == "bands") {
            config.band_fractions.clear();
            for (double pct : parse_double_list(value, "bands")) {
                config.band_fractions.push_back(pct / 100.0);
            }
        } else if (key == "ks") {
            config.ks = parse_size_list(value, "ks");
        } else if (key == "page_sizes") {
            config.page_sizes = parse_size_list(value, "page_sizes");
        } else if (key == "queries") {
            config.query_count = std::stoull(value);
        } else if (key == "seed") {
            config.seed = std::stoull(value);
        } else if (key == "default_count") {
            config.default_count = std::stoull(value);
        } else if (key == "default_length") {
            config.default_length = std::stoull(value);
        } else if (key == "default_band") {
            config.default_band = std::stod(value) / 100.0;
        } else if (key == "default_k") {
            config.default_k = std::stoull(value);
        } else if (key == "default_page_size") {
            config.default_page_size = std::stoull(value);
        } else {
            twist::throw_invalid("unknown bench spec key '" + key + "'");
        }
    }

    const auto report = twist::run_benchmark(config);
    if (out_path.empty()) {
        twist::write_report_csv(std::cout, report);
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) twist::throw_io("cannot open report file " + out_path);
        twist::write_report_csv(out, report);
    }
    return 0;
}

int cmd_verify(const std::string& index_dir) {
    const auto report = twist::verify_index(index_dir);
    if (report.ok()) {
        std::cout << "ok: partition, containment, and round-trip checks passed\n";
        return 0;
    }
    for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
    return exit_code(twist::ErrorKind::InvariantViolation);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TWIST: exact similarity search for equal-length time series under "
                 "constrained time warping"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random-walk dataset file");
    std::string gen_model = "rw1";
    std::size_t gen_count = 0, gen_length = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--model", gen_model, "rw1 | rw2")->capture_default_str();
    gen->add_option("--count", gen_count, "number of sequences")->required();
    gen->add_option("--length", gen_length, "sequence length")->required();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output dataset file")->required();

    // build
    auto* build = app.add_subcommand("build", "Bulk-build an index from a dataset file");
    std::string build_dataset, build_dir, build_ladder;
    std::size_t build_page_size = 128;
    double build_band = 10.0;
    int build_p = 2;
    std::uint64_t build_seed = 0;
    build->add_option("--dataset", build_dataset, "dataset file")->required();
    build->add_option("--index-dir", build_dir, "index directory")->required();
    build->add_option("--page-size", build_page_size, "max sequences per page")
        ->capture_default_str();
    build->add_option("--band-pct", build_band, "warping band width, percent of length")
        ->capture_default_str();
    build->add_option("--p", build_p, "L_p norm dimension")->capture_default_str();
    build->add_option("--seed", build_seed, "split seed, recorded in the manifest")
        ->capture_default_str();
    build->add_option("--ladder", build_ladder,
                      "comma-separated segment sizes, coarsest first (default n/2,n/8,n/32,n/128)");

    // insert
    auto* insert = app.add_subcommand("insert", "Insert sequences from a dataset file");
    std::string insert_dir, insert_input;
    insert->add_option("--index-dir", insert_dir, "index directory")->required();
    insert->add_option("--input", insert_input, "dataset file with sequences to insert")
        ->required();

    // delete
    auto* del = app.add_subcommand("delete", "Delete a sequence by id");
    std::string del_dir, del_policy = "eager";
    std::uint64_t del_id = 0;
    del->add_option("--index-dir", del_dir, "index directory")->required();
    del->add_option("--id", del_id, "sequence id")->required();
    del->add_option("--policy", del_policy, "eager | lazy")->capture_default_str();

    // query
    auto* query = app.add_subcommand("query", "Run top-k or range queries; CSV on stdout");
    std::string query_dir, query_file, query_method = "lbg", query_sf;
    std::size_t query_k = 1;
    double query_epsilon = 0.0;
    query->add_option("--index-dir", query_dir, "index directory")->required();
    query->add_option("--query", query_file, "dataset file holding query sequences")->required();
    query->add_option("--method", query_method, "lbg | lbgk | scan")->capture_default_str();
    auto* k_opt = query->add_option("--k", query_k, "top-k result count");
    auto* eps_opt = query->add_option("--epsilon", query_epsilon, "range query radius");
    k_opt->excludes(eps_opt);
    query->add_option("--sf", query_sf, "comma-separated speedup factors (default 5,10)");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the measurement harness from a spec file");
    std::string bench_spec, bench_out, bench_work;
    bench->add_option("--spec", bench_spec, "bench spec file (key=value lines)")->required();
    bench->add_option("--out", bench_out, "report CSV path (default stdout)");
    bench->add_option("--work-dir", bench_work, "scratch directory for built indexes");

    // verify
    auto* verify = app.add_subcommand("verify", "Audit index invariants");
    std::string verify_dir;
    verify->add_option("--index-dir", verify_dir, "index directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_model, gen_count, gen_length, gen_seed, gen_out);
        if (build->parsed()) {
            return cmd_build(build_dataset, build_dir, build_page_size, build_band, build_p,
                             build_seed, build_ladder);
        }
        if (insert->parsed()) return cmd_insert(insert_dir, insert_input);
        if (del->parsed()) return cmd_delete(del_dir, del_id, del_policy);
        if (query->parsed()) {
            return cmd_query(query_dir, query_file, query_method, query_k, query_epsilon,
                             eps_opt->count() > 0, query_sf);
        }
        if (bench->parsed()) return cmd_bench(bench_spec, bench_out, bench_work);
        if (verify->parsed()) return cmd_verify(verify_dir);
    } catch (const twist::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
