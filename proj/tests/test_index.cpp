#include <doctest.h>

#include <filesystem>
#include <set>

#include "oracles.hpp"
#include "twist/index.hpp"
#include "twist/query.hpp"

using twist::DeletionPolicy;
using twist::DsfPage;
using twist::GlobalConstraint;
using twist::IndexConfig;
using twist::TimeSeries;
using twist::TwistIndex;

namespace {

TimeSeries ts(std::initializer_list<double> values, twist::SeqId id = 0) {
    return TimeSeries{id, values};
}

IndexConfig small_config(std::size_t n, std::size_t page_size, double band = 1.0) {
    IndexConfig config;
    config.n = n;
    config.max_page_size = page_size;
    config.ladder = twist::default_ladder(n);
    config.constraint = GlobalConstraint::sakoe_chiba(band, n);
    return config;
}

std::filesystem::path temp_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() /
               (std::string("twist_index_") + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

// Partition + containment, straight from the in-memory structures.
void check_structural_invariants(const TwistIndex& idx) {
    std::set<twist::SeqId> seen;
    std::size_t total = 0;
    for (const auto& rec : idx.esf()) {
        const DsfPage& page = idx.page(rec.page_id);
        REQUIRE(!page.sequences.empty());
        CHECK(page.size() <= idx.config().max_page_size);
        for (const auto& s : page.sequences) {
            CHECK(seen.insert(s.id).second);
            CHECK(rec.envelope.contains(s.values));
            ++total;
        }
    }
    CHECK(total == idx.sequence_count());
}

} // namespace

TEST_CASE("insertion cost frozen examples") {
    twist::GroupEnvelope eg;
    eg.upper = {1, 1};
    eg.lower = {0, 0};
    CHECK(twist::insertion_cost(eg, ts({0.5, 0.5}), 2) == 0.0);
    // Out-of-hull points are charged against the opposite bound.
    CHECK(twist::insertion_cost(eg, ts({3, 3}), 2) == doctest::Approx(18.0));
    CHECK(twist::insertion_cost(eg, ts({-2, -2}), 2) == doctest::Approx(18.0));
    CHECK_THROWS_AS(twist::insertion_cost(eg, ts({1}), 2), twist::Error);
}

TEST_CASE("update_envelope matches rebuilding from scratch") {
    oracle::Rng rng(501);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.integer(1, 16);
        const std::size_t count = rng.integer(1, 10);
        DsfPage page;
        page.page_id = 0;
        for (std::size_t i = 0; i < count; ++i) page.sequences.push_back(rng.series(i, n));

        auto folded = twist::build_group_envelope(
            std::vector<TimeSeries>{page.sequences.front()});
        for (std::size_t i = 1; i < count; ++i) {
            folded = twist::update_envelope(std::move(folded), page.sequences[i]);
        }
        const auto rebuilt = twist::create_envelope(page);
        CHECK(folded.upper == rebuilt.upper);
        CHECK(folded.lower == rebuilt.lower);
        CHECK(folded.member_count == rebuilt.member_count);
    }
}

TEST_CASE("update_envelope keeps bounds for an inside sequence") {
    twist::GroupEnvelope eg;
    eg.upper = {1, 1};
    eg.lower = {0, 0};
    eg.member_count = 2;
    const auto same = twist::update_envelope(eg, ts({0.5, 0.25}));
    CHECK(same.upper == eg.upper);
    CHECK(same.lower == eg.lower);
    CHECK(same.member_count == 3);

    const auto grown = twist::update_envelope(eg, ts({2, -1}));
    CHECK(grown.upper == std::vector<double>{2, 1});
    CHECK(grown.lower == std::vector<double>{0, -1});
}

TEST_CASE("split separates distant members and keeps both sides non-empty") {
    DsfPage page;
    page.page_id = 0;
    page.sequences = {ts({0, 0}, 1), ts({0, 0}, 2), ts({9, 9}, 3)};
    const auto [x, y] = twist::split_dsf(page, 10, 11);
    CHECK(x.page_id == 10);
    CHECK(y.page_id == 11);
    CHECK(x.size() + y.size() == 3);
    // 2-means with farthest-pair seeding puts the two zero sequences together.
    const auto& zeros = x.size() == 2 ? x : y;
    const auto& nines = x.size() == 2 ? y : x;
    CHECK(zeros.size() == 2);
    CHECK(nines.sequences.front().id == 3);

    DsfPage two;
    two.page_id = 0;
    two.sequences = {ts({1, 1}, 5), ts({2, 2}, 6)};
    const auto [a, b] = twist::split_dsf(two, 1, 2);
    CHECK(a.size() == 1);
    CHECK(b.size() == 1);

    DsfPage identical;
    identical.page_id = 0;
    identical.sequences = {ts({3, 3}, 4), ts({3, 3}, 2), ts({3, 3}, 9), ts({3, 3}, 7)};
    const auto [h1, h2] = twist::split_dsf(identical, 1, 2);
    CHECK(h1.size() == 2);
    CHECK(h2.size() == 2);
    // Balanced halving follows id order.
    CHECK(h1.sequences[0].id == 2);
    CHECK(h1.sequences[1].id == 4);

    CHECK_THROWS_AS(twist::split_dsf(DsfPage{0, {ts({1, 1})}}, 1, 2), twist::Error);
}

TEST_CASE("split is non-degenerate on random pages") {
    oracle::Rng rng(502);
    for (int trial = 0; trial < 100; ++trial) {
        DsfPage page;
        page.page_id = 0;
        const std::size_t count = rng.integer(2, 40);
        const std::size_t n = rng.integer(1, 12);
        for (std::size_t i = 0; i < count; ++i) page.sequences.push_back(rng.series(i, n));
        const auto [x, y] = twist::split_dsf(page, 1, 2);
        CHECK(!x.sequences.empty());
        CHECK(!y.sequences.empty());
        CHECK(x.size() + y.size() == count);
    }
}

TEST_CASE("insert into an empty index creates the first page") {
    auto idx = TwistIndex::create(small_config(2, 4));
    idx.insert(ts({1, 2}, 7));
    REQUIRE(idx.page_count() == 1);
    const auto& rec = idx.esf().front();
    CHECK(rec.envelope.upper == std::vector<double>{1, 2});
    CHECK(rec.envelope.lower == std::vector<double>{1, 2});
    CHECK(idx.sequence_count() == 1);
}

TEST_CASE("insert routes to the minimum-cost envelope") {
    auto forced = TwistIndex::create(small_config(2, 2));
    forced.insert(ts({0, 0}, 0));
    forced.insert(ts({1, 1}, 1));
    forced.insert(ts({100, 100}, 2)); // split into near-0 and near-100 pages
    REQUIRE(forced.page_count() == 2);
    forced.insert(ts({0.5, 0.5}, 3)); // lands in the near-0 page
    check_structural_invariants(forced);
    for (const auto& rec : forced.esf()) {
        const auto& page = forced.page(rec.page_id);
        const bool near_zero = page.sequences.front().values[0] < 50;
        for (const auto& s : page.sequences) {
            CHECK((s.values[0] < 50) == near_zero);
        }
    }
}

TEST_CASE("capacity overflow splits the page and replaces the record") {
    auto idx = TwistIndex::create(small_config(2, 2));
    idx.insert(ts({0, 0}, 0));
    idx.insert(ts({0.1, 0.1}, 1));
    CHECK(idx.page_count() == 1);
    idx.insert(ts({9, 9}, 2));
    CHECK(idx.page_count() == 2);
    check_structural_invariants(idx);

    CHECK_THROWS_AS(idx.insert(ts({0, 0}, 1)), twist::Error);  // duplicate id
    CHECK_THROWS_AS(idx.insert(ts({0, 0, 0}, 5)), twist::Error); // wrong length
}

TEST_CASE("bulk build page counts at the capacity boundary") {
    oracle::Rng rng(503);
    const std::size_t alpha = 8;
    auto config = small_config(4, alpha);

    CHECK(TwistIndex::bulk_build(config, {}).page_count() == 0);

    std::vector<TimeSeries> exactly;
    for (std::size_t i = 0; i < alpha; ++i) exactly.push_back(rng.series(i, 4));
    CHECK(TwistIndex::bulk_build(config, exactly).page_count() == 1);

    std::vector<TimeSeries> overflow = exactly;
    overflow.push_back(rng.series(alpha, 4));
    CHECK(TwistIndex::bulk_build(config, overflow).page_count() == 2);
}

TEST_CASE("eager delete tightens the envelope, lazy delete leaves it") {
    auto idx = TwistIndex::create(small_config(2, 8));
    idx.insert(ts({0, 0}, 0));
    idx.insert(ts({1, 1}, 1));
    idx.insert(ts({5, 5}, 2)); // the page's sole extreme member

    idx.erase(2, DeletionPolicy::Eager);
    CHECK(idx.esf().front().envelope.upper == std::vector<double>{1, 1});
    check_structural_invariants(idx);

    idx.insert(ts({7, 7}, 3));
    idx.erase(3, DeletionPolicy::Lazy);
    CHECK(idx.esf().front().envelope.upper == std::vector<double>{7, 7});
    check_structural_invariants(idx); // containment holds, hull is loose

    idx.erase(0, DeletionPolicy::Lazy);
    idx.erase(1, DeletionPolicy::Eager);
    CHECK(idx.page_count() == 0); // emptied page drops its record
    CHECK(idx.sequence_count() == 0);

    CHECK_THROWS_AS(idx.erase(42, DeletionPolicy::Eager), twist::Error);
}

TEST_CASE("mutation storm preserves partition and containment") {
    oracle::Rng rng(504);
    auto idx = TwistIndex::create(small_config(8, 4));
    std::vector<twist::SeqId> live;
    twist::SeqId next_id = 0;

    for (int step = 0; step < 600; ++step) {
        const bool do_delete = !live.empty() && rng.integer(0, 99) < 30;
        if (do_delete) {
            const std::size_t pick = rng.integer(0, live.size() - 1);
            const auto policy = rng.integer(0, 1) == 0 ? DeletionPolicy::Eager
                                                       : DeletionPolicy::Lazy;
            idx.erase(live[pick], policy);
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
        } else {
            idx.insert(rng.series(next_id, 8));
            live.push_back(next_id++);
        }
    }
    CHECK(idx.sequence_count() == live.size());
    check_structural_invariants(idx);
}

TEST_CASE("bulk build equals sequential insertion") {
    oracle::Rng rng(505);
    std::vector<TimeSeries> dataset;
    for (std::size_t i = 0; i < 40; ++i) dataset.push_back(rng.series(i, 4));

    const auto built = TwistIndex::bulk_build(small_config(4, 4), dataset);
    auto inserted = TwistIndex::create(small_config(4, 4));
    for (const auto& s : dataset) inserted.insert(s);

    REQUIRE(built.page_count() == inserted.page_count());
    for (std::size_t i = 0; i < built.esf().size(); ++i) {
        CHECK(built.esf()[i].page_id == inserted.esf()[i].page_id);
        CHECK(built.esf()[i].envelope.upper == inserted.esf()[i].envelope.upper);
        CHECK(built.esf()[i].envelope.lower == inserted.esf()[i].envelope.lower);
    }

    std::vector<TimeSeries> with_duplicate = dataset;
    with_duplicate.push_back(dataset.front());
    CHECK_THROWS_AS(TwistIndex::bulk_build(small_config(4, 4), with_duplicate),
                    twist::Error);
}

TEST_CASE("commit and open round-trip the whole index") {
    const auto dir = temp_dir("roundtrip");
    oracle::Rng rng(506);
    std::vector<TimeSeries> dataset;
    for (std::size_t i = 0; i < 30; ++i) dataset.push_back(rng.series(i, 8));

    auto idx = TwistIndex::bulk_build(small_config(8, 4, 0.25), dataset);
    idx.commit(dir);

    auto reopened = TwistIndex::open(dir);
    CHECK(reopened.sequence_count() == dataset.size());
    CHECK(reopened.page_count() == idx.page_count());
    for (std::size_t i = 0; i < idx.esf().size(); ++i) {
        CHECK(reopened.esf()[i].page_id == idx.esf()[i].page_id);
        CHECK(reopened.esf()[i].envelope.upper == idx.esf()[i].envelope.upper);
    }

    // Mutations after reopening persist across a second commit.
    reopened.insert(rng.series(999, 8));
    reopened.erase(0, DeletionPolicy::Eager);
    reopened.commit(dir);
    auto again = TwistIndex::open(dir);
    CHECK(again.contains(999));
    CHECK(!again.contains(0));
    CHECK(twist::verify_index(dir).ok());
}

TEST_CASE("verify_index flags a corrupted envelope") {
    const auto dir = temp_dir("verify");
    oracle::Rng rng(507);
    std::vector<TimeSeries> dataset;
    for (std::size_t i = 0; i < 12; ++i) dataset.push_back(rng.series(i, 8));
    auto idx = TwistIndex::bulk_build(small_config(8, 4), dataset);
    idx.commit(dir);
    REQUIRE(twist::verify_index(dir).ok());

    // Push one upper bound below a member value.
    auto records = twist::load_esf(dir);
    records.front().envelope.upper[0] =
        idx.page(records.front().page_id).sequences.front().values[0] - 1.0;
    twist::write_esf(dir, records, 8);
    const auto report = twist::verify_index(dir);
    CHECK(!report.ok());
}
