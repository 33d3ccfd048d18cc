#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "twist/bench.hpp"
#include "twist/index.hpp"
#include "twist/query.hpp"

namespace py = pybind11;
using namespace twist;

namespace {

RwModel model_from_string(const std::string& name) {
    if (name == "rw1") return RwModel::Rw1;
    if (name == "rw2") return RwModel::Rw2;
    throw_invalid("unknown generator model '" + name + "' (expected rw1 or rw2)");
}

DeletionPolicy policy_from_string(const std::string& name) {
    if (name == "eager") return DeletionPolicy::Eager;
    if (name == "lazy") return DeletionPolicy::Lazy;
    throw_invalid("unknown deletion policy '" + name + "' (expected eager or lazy)");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact similarity search for equal-length time series under "
              "constrained time warping (grouped sequential pages with "
              "envelope pruning)";

    py::register_exception<Error>(m, "TwistError");

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init<>())
        .def(py::init([](SeqId id, std::vector<double> values) {
                 return TimeSeries{id, std::move(values)};
             }),
             py::arg("id"), py::arg("values"))
        .def_readwrite("id", &TimeSeries::id)
        .def_readwrite("values", &TimeSeries::values)
        .def("__len__", &TimeSeries::length)
        .def("__repr__", [](const TimeSeries& s) {
            return "TimeSeries(id=" + std::to_string(s.id) +
                   ", n=" + std::to_string(s.length()) + ")";
        });

    py::class_<GlobalConstraint>(m, "GlobalConstraint")
        .def(py::init<std::vector<std::uint32_t>>(), py::arg("radii"))
        .def_static("sakoe_chiba", &GlobalConstraint::sakoe_chiba,
                    py::arg("width_fraction"), py::arg("n"))
        .def_static("unconstrained", &GlobalConstraint::unconstrained, py::arg("n"))
        .def_property_readonly("radii", &GlobalConstraint::radii)
        .def("__len__", &GlobalConstraint::length);

    py::class_<DistanceParams>(m, "DistanceParams")
        .def(py::init([](int p, bool apply_root) {
                 return DistanceParams{p, apply_root};
             }),
             py::arg("p") = 2, py::arg("apply_root") = true)
        .def_readwrite("p", &DistanceParams::p)
        .def_readwrite("apply_root", &DistanceParams::apply_root);

    m.def("dtw", &dtw, py::arg("q"), py::arg("c"), py::arg("constraint"),
          py::arg("params") = DistanceParams{},
          "Band-constrained warping distance between two equal-length sequences");
    m.def("sakoe_chiba", &sakoe_chiba, py::arg("width_fraction"), py::arg("n"));

    py::class_<QueryEnvelope>(m, "QueryEnvelope")
        .def_readonly("upper", &QueryEnvelope::upper)
        .def_readonly("lower", &QueryEnvelope::lower);
    py::class_<GroupEnvelope>(m, "GroupEnvelope")
        .def_readonly("upper", &GroupEnvelope::upper)
        .def_readonly("lower", &GroupEnvelope::lower)
        .def_readonly("member_count", &GroupEnvelope::member_count);
    py::class_<SegmentedSequence>(m, "SegmentedSequence")
        .def_readonly("segment_size", &SegmentedSequence::segment_size)
        .def_readonly("upper", &SegmentedSequence::upper)
        .def_readonly("lower", &SegmentedSequence::lower);
    py::class_<SegmentedGroupEnvelope>(m, "SegmentedGroupEnvelope")
        .def_readonly("segment_size", &SegmentedGroupEnvelope::segment_size)
        .def_readonly("upper", &SegmentedGroupEnvelope::upper)
        .def_readonly("lower", &SegmentedGroupEnvelope::lower);
    py::class_<ConstraintExpandedEnvelope>(m, "ConstraintExpandedEnvelope")
        .def_readonly("upper", &ConstraintExpandedEnvelope::upper)
        .def_readonly("lower", &ConstraintExpandedEnvelope::lower);

    m.def("build_query_envelope", &build_query_envelope, py::arg("q"), py::arg("constraint"));
    m.def("lb_keogh", &lb_keogh, py::arg("envelope"), py::arg("c"),
          py::arg("params") = DistanceParams{});
    m.def(
        "segment",
        [](const TimeSeries& s, std::size_t t_size) { return segment(s, t_size); },
        py::arg("s"), py::arg("t_size"));
    m.def("lbs", &lbs, py::arg("q_seg"), py::arg("c_seg"),
          py::arg("params") = DistanceParams{});
    m.def(
        "build_group_envelope",
        [](const std::vector<TimeSeries>& members) { return build_group_envelope(members); },
        py::arg("members"));
    m.def("segment_group_envelope", &segment_group_envelope, py::arg("envelope"),
          py::arg("t_size"));
    m.def("lbg", &lbg, py::arg("q_seg"), py::arg("envelope_seg"),
          py::arg("params") = DistanceParams{});
    m.def("expand_envelope_by_constraint", &expand_envelope_by_constraint,
          py::arg("envelope"), py::arg("constraint"));
    m.def("lbg_k", &lbg_k, py::arg("q"), py::arg("expanded_envelope"),
          py::arg("params") = DistanceParams{});
    m.def("default_ladder", &default_ladder, py::arg("n"));

    py::class_<AccessStats>(m, "AccessStats")
        .def(py::init<>())
        .def_readwrite("esf_envelope_reads", &AccessStats::esf_envelope_reads)
        .def_readwrite("candidate_sequences_read", &AccessStats::candidate_sequences_read)
        .def_readwrite("dsf_random_accesses", &AccessStats::dsf_random_accesses);

    m.def(
        "page_access_count",
        [](const AccessStats& stats, double sf, const std::string& mode) {
            if (mode == "lbg") return page_access_count(stats, sf, AccessMode::Lbg);
            if (mode == "lbgk") return page_access_count(stats, sf, AccessMode::LbgK);
            throw_invalid("mode must be 'lbg' or 'lbgk'");
        },
        py::arg("stats"), py::arg("speedup_factor"), py::arg("mode"));

    py::class_<IndexConfig>(m, "IndexConfig")
        .def(py::init([](std::size_t n, std::size_t max_page_size, int p,
                         std::vector<std::size_t> ladder, const GlobalConstraint* constraint,
                         const std::string& deletion_policy, std::uint64_t split_seed) {
                 IndexConfig config;
                 config.n = n;
                 config.max_page_size = max_page_size;
                 config.params.p = p;
                 config.ladder = ladder.empty() ? default_ladder(n) : std::move(ladder);
                 config.constraint = constraint ? *constraint
                                                : GlobalConstraint::sakoe_chiba(0.10, n);
                 config.deletion_policy = policy_from_string(deletion_policy);
                 config.split_seed = split_seed;
                 config.validate();
                 return config;
             }),
             py::arg("n"), py::arg("max_page_size") = 128, py::arg("p") = 2,
             py::arg("ladder") = std::vector<std::size_t>{},
             py::arg("constraint") = nullptr, py::arg("deletion_policy") = "eager",
             py::arg("split_seed") = 0)
        .def_readonly("n", &IndexConfig::n)
        .def_readonly("max_page_size", &IndexConfig::max_page_size)
        .def_readonly("ladder", &IndexConfig::ladder)
        .def_readonly("constraint", &IndexConfig::constraint);

    py::class_<Hit>(m, "Hit")
        .def_readonly("id", &Hit::id)
        .def_readonly("distance", &Hit::distance)
        .def("__repr__", [](const Hit& h) {
            return "Hit(id=" + std::to_string(h.id) +
                   ", distance=" + std::to_string(h.distance) + ")";
        });

    py::class_<LbCounts>(m, "LbCounts")
        .def_readonly("keogh", &LbCounts::keogh)
        .def_readonly("lbs", &LbCounts::lbs)
        .def_readonly("lbg", &LbCounts::lbg)
        .def_readonly("lbg_k", &LbCounts::lbg_k)
        .def("total", &LbCounts::total);

    py::class_<QueryResult>(m, "QueryResult")
        .def_readonly("hits", &QueryResult::hits)
        .def_readonly("stats", &QueryResult::stats)
        .def_readonly("dtw_evaluations", &QueryResult::dtw_evaluations)
        .def_readonly("lb_evaluations", &QueryResult::lb_evaluations);

    py::class_<TwistIndex>(m, "TwistIndex")
        .def_static("create", &TwistIndex::create, py::arg("config"))
        .def_static("bulk_build", &TwistIndex::bulk_build, py::arg("config"),
                    py::arg("dataset"))
        .def_static("open", &TwistIndex::open, py::arg("index_dir"))
        .def("insert", &TwistIndex::insert, py::arg("sequence"))
        .def(
            "erase",
            [](TwistIndex& idx, SeqId id, const std::string& policy) {
                idx.erase(id, policy_from_string(policy));
            },
            py::arg("id"), py::arg("policy") = "eager")
        .def("commit", &TwistIndex::commit, py::arg("index_dir"))
        .def("contains", &TwistIndex::contains, py::arg("id"))
        .def_property_readonly("page_count", &TwistIndex::page_count)
        .def_property_readonly("sequence_count", &TwistIndex::sequence_count)
        .def_property_readonly("config", &TwistIndex::config);

    m.def("topk_lbg", &topk_lbg, py::arg("index"), py::arg("q"), py::arg("k"),
          "Exact top-k via multiresolution group-envelope pruning");
    m.def("topk_lbgk", &topk_lbgk, py::arg("index"), py::arg("q"), py::arg("k"),
          "Exact top-k via the constraint-expanded group envelope");
    m.def("range_query", &range_query, py::arg("index"), py::arg("q"), py::arg("epsilon"));
    m.def(
        "sequential_scan",
        [](const TwistIndex& idx, const TimeSeries& q, std::size_t k, bool lb_filter,
           bool early_abandon) {
            return sequential_scan(idx, q, k, ScanOptions{lb_filter, early_abandon});
        },
        py::arg("index"), py::arg("q"), py::arg("k"), py::arg("lb_keogh_filter") = true,
        py::arg("early_abandon") = true);

    m.def("z_normalize", &z_normalize, py::arg("s"));
    m.def(
        "generate",
        [](const std::string& model, std::size_t count, std::size_t length,
           std::uint64_t seed) {
            return generate(GeneratorSpec{model_from_string(model), count, length, seed});
        },
        py::arg("model"), py::arg("count"), py::arg("length"), py::arg("seed") = 0,
        "Seeded random-walk dataset, Z-normalized");
    m.def("make_clustered_dataset", &make_clustered_dataset, py::arg("groups"),
          py::arg("count"), py::arg("length"), py::arg("noise_sigma") = 0.05,
          py::arg("seed") = 0);

    m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("dataset"));
    m.def("read_dataset", &read_dataset, py::arg("path"));
    m.def(
        "verify_index",
        [](const std::filesystem::path& dir) { return verify_index(dir).violations; },
        py::arg("index_dir"),
        "Returns the list of invariant violations; empty means the index is sound");

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
