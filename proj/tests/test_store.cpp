#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "twist/store.hpp"

using twist::AccessMode;
using twist::AccessStats;
using twist::DsfPage;
using twist::EsfRecord;
using twist::TimeSeries;

namespace {

std::filesystem::path temp_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() /
               (std::string("twist_store_") + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

DsfPage random_page(oracle::Rng& rng, twist::PageId id, std::size_t count, std::size_t n) {
    DsfPage page;
    page.page_id = id;
    for (std::size_t i = 0; i < count; ++i) {
        page.sequences.push_back(rng.series(id * 1000 + i, n));
    }
    return page;
}

} // namespace

TEST_CASE("dsf pages round-trip bit-exactly") {
    const auto dir = temp_dir("dsf");
    oracle::Rng rng(401);
    for (int trial = 0; trial < 10; ++trial) {
        const auto page = random_page(rng, static_cast<twist::PageId>(trial),
                                      rng.integer(1, 9), rng.integer(1, 33));
        twist::write_dsf(dir, page);
        const auto loaded = twist::read_dsf(dir, page.page_id);
        REQUIRE(loaded.size() == page.size());
        for (std::size_t i = 0; i < page.size(); ++i) {
            CHECK(loaded.sequences[i].id == page.sequences[i].id);
            CHECK(loaded.sequences[i].values == page.sequences[i].values);
        }
    }
}

TEST_CASE("dsf file size follows the format") {
    const auto dir = temp_dir("dsf_size");
    oracle::Rng rng(402);
    const auto page = random_page(rng, 7, 1, 4);
    twist::write_dsf(dir, page);
    // header + one sequence of 4 values + one id
    const auto expected = twist::kDsfHeaderBytes + 4 * 8 + 8;
    CHECK(std::filesystem::file_size(twist::dsf_path(dir, 7)) == expected);
}

TEST_CASE("rewriting a page id overwrites the page") {
    const auto dir = temp_dir("dsf_overwrite");
    oracle::Rng rng(403);
    twist::write_dsf(dir, random_page(rng, 3, 5, 8));
    const auto replacement = random_page(rng, 3, 2, 8);
    twist::write_dsf(dir, replacement);
    const auto loaded = twist::read_dsf(dir, 3);
    CHECK(loaded.size() == 2);
    CHECK(loaded.sequences[0].id == replacement.sequences[0].id);
}

TEST_CASE("sequential reads update the access counters") {
    const auto dir = temp_dir("dsf_stats");
    oracle::Rng rng(404);
    twist::write_dsf(dir, random_page(rng, 0, 3, 8));

    AccessStats stats;
    const auto page = twist::read_dsf_sequential(dir, 0, stats);
    CHECK(page.size() == 3);
    CHECK(stats.candidate_sequences_read == 3);
    CHECK(stats.dsf_random_accesses == 1);

    // No caching credit: a second read counts again.
    twist::read_dsf_sequential(dir, 0, stats);
    CHECK(stats.candidate_sequences_read == 6);
    CHECK(stats.dsf_random_accesses == 2);

    CHECK_THROWS_AS(twist::read_dsf_sequential(dir, 42, stats), twist::Error);
}

TEST_CASE("esf round-trips and counts one pass per load") {
    const auto dir = temp_dir("esf");
    oracle::Rng rng(405);

    std::vector<EsfRecord> records;
    const std::size_t n = 16;
    for (twist::PageId id : {0u, 1u, 2u, 3u}) {
        EsfRecord rec;
        rec.page_id = id;
        rec.envelope.upper = rng.values(n, 1.0, 2.0);
        rec.envelope.lower = rng.values(n, -2.0, -1.0);
        rec.envelope.member_count = static_cast<std::uint32_t>(rng.integer(1, 9));
        records.push_back(rec);
    }
    twist::write_esf(dir, records, n);

    AccessStats stats;
    const auto loaded = twist::load_esf(dir, stats);
    CHECK(stats.esf_envelope_reads == 4);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].page_id == records[i].page_id);
        CHECK(loaded[i].envelope.upper == records[i].envelope.upper);
        CHECK(loaded[i].envelope.lower == records[i].envelope.lower);
        CHECK(loaded[i].envelope.member_count == records[i].envelope.member_count);
    }

    // Empty index: empty record list.
    const auto empty_dir = temp_dir("esf_empty");
    twist::write_esf(empty_dir, {}, n);
    CHECK(twist::load_esf(empty_dir).empty());

    // Corrupt ESF file fails to load.
    {
        std::ofstream out(twist::esf_path(dir), std::ios::binary | std::ios::trunc);
        out << "garbage";
    }
    CHECK_THROWS_AS(twist::load_esf(dir), twist::Error);
}

TEST_CASE("esf size matches the closed form") {
    const auto dir = temp_dir("esf_size");
    oracle::Rng rng(406);
    const std::size_t n = 32;
    std::vector<EsfRecord> records;
    for (twist::PageId id = 0; id < 5; ++id) {
        EsfRecord rec;
        rec.page_id = id;
        rec.envelope.upper = rng.values(n);
        rec.envelope.lower = rng.values(n);
        rec.envelope.member_count = 1;
        records.push_back(rec);
    }
    twist::write_esf(dir, records, n);
    const auto expected =
        twist::kEsfHeaderBytes + records.size() * (16 * n + twist::kEsfRecordFixedBytes);
    CHECK(twist::esf_file_bytes(dir) == expected);
}

TEST_CASE("page access count follows the two formulas") {
    AccessStats stats;
    stats.esf_envelope_reads = 10;
    stats.candidate_sequences_read = 100;
    stats.dsf_random_accesses = 3;
    CHECK(twist::page_access_count(stats, 5.0, AccessMode::Lbg) == doctest::Approx(27.0));
    CHECK(twist::page_access_count(stats, 5.0, AccessMode::LbgK) == doctest::Approx(25.0));

    AccessStats pure;
    pure.esf_envelope_reads = 12;
    CHECK(twist::page_access_count(pure, 6.0, AccessMode::Lbg) == doctest::Approx(4.0));
    CHECK(twist::page_access_count(pure, 6.0, AccessMode::LbgK) == doctest::Approx(2.0));

    CHECK_THROWS_AS(twist::page_access_count(stats, 0.0, AccessMode::Lbg), twist::Error);
}

TEST_CASE("manifest round-trips the index configuration") {
    const auto dir = temp_dir("manifest");

    twist::IndexConfig config;
    config.n = 64;
    config.max_page_size = 16;
    config.params.p = 2;
    config.params.apply_root = true;
    config.ladder = twist::default_ladder(64);
    config.constraint = twist::GlobalConstraint::sakoe_chiba(0.10, 64);
    config.deletion_policy = twist::DeletionPolicy::Lazy;
    config.split_seed = 1234;
    twist::write_manifest(dir, config);

    const auto loaded = twist::read_manifest(dir);
    CHECK(loaded.n == config.n);
    CHECK(loaded.max_page_size == config.max_page_size);
    CHECK(loaded.params.p == config.params.p);
    CHECK(loaded.params.apply_root == config.params.apply_root);
    CHECK(loaded.ladder == config.ladder);
    CHECK(loaded.constraint.radii() == config.constraint.radii());
    CHECK(loaded.deletion_policy == twist::DeletionPolicy::Lazy);
    CHECK(loaded.split_seed == 1234);

    // Non-uniform constraints persist explicitly.
    std::vector<std::uint32_t> radii(64, 2);
    radii[5] = 7;
    config.constraint = twist::GlobalConstraint(radii);
    twist::write_manifest(dir, config);
    CHECK(twist::read_manifest(dir).constraint.radii() == radii);
}

TEST_CASE("dataset files round-trip") {
    const auto dir = temp_dir("dataset");
    oracle::Rng rng(407);
    std::vector<TimeSeries> data;
    for (std::size_t i = 0; i < 7; ++i) data.push_back(rng.series(i, 12));
    const auto file = dir / "data.twdt";
    twist::write_dataset(file, data);
    const auto loaded = twist::read_dataset(file);
    REQUIRE(loaded.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(loaded[i].id == data[i].id);
        CHECK(loaded[i].values == data[i].values);
    }

    // A dataset file is not a page file and vice versa.
    CHECK_THROWS_AS(twist::read_dsf(dir, 999), twist::Error);
    std::filesystem::copy_file(file, twist::dsf_path(dir, 1));
    CHECK_THROWS_AS(twist::read_dsf(dir, 1), twist::Error);
}

TEST_CASE("index config validation") {
    twist::IndexConfig config;
    config.n = 8;
    config.max_page_size = 4;
    config.ladder = {4, 1};
    config.constraint = twist::GlobalConstraint::sakoe_chiba(0.5, 8);
    CHECK_NOTHROW(config.validate());

    auto bad = config;
    bad.ladder = {1, 4};
    CHECK_THROWS_AS(bad.validate(), twist::Error);
    bad = config;
    bad.ladder = {4, 4};
    CHECK_THROWS_AS(bad.validate(), twist::Error);
    bad = config;
    bad.max_page_size = 0;
    CHECK_THROWS_AS(bad.validate(), twist::Error);
    bad = config;
    bad.constraint = twist::GlobalConstraint::sakoe_chiba(0.5, 4);
    CHECK_THROWS_AS(bad.validate(), twist::Error);
}
