#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "qsf/cover.hpp"

#include "oracles.hpp"

using namespace qsf;

namespace {

CoverInstance make_instance(uint32_t items, const std::vector<std::vector<uint32_t>>& options) {
    CoverInstance inst;
    inst.items = items;
    for (uint32_t i = 0; i < options.size(); ++i) {
        CoverOption o;
        o.col_id = i;
        o.rows = options[i];
        std::sort(o.rows.begin(), o.rows.end());
        inst.options.push_back(std::move(o));
    }
    return inst;
}

std::vector<SolutionSet> solve_all(const CoverInstance& inst, SolveOptions opts = {}) {
    std::vector<SolutionSet> out;
    solve(inst, opts, [&](const SolutionSet& s) {
        out.push_back(s);
        return true;
    });
    return out;
}

} // namespace

TEST_CASE("empty instance has exactly the empty cover") {
    CoverInstance inst;
    inst.items = 0;
    SolveOptions opts;
    std::vector<SolutionSet> sols = solve_all(inst);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].selected.empty());
    SearchStats stats = solve(inst, opts, [](const SolutionSet&) { return true; });
    CHECK(stats.exhaustive);
}

TEST_CASE("classic 7-item instance") {
    // Knuth's example: unique solution {0, 3, 4}
    CoverInstance inst = make_instance(
        7, {{2, 4, 5}, {0, 3, 6}, {1, 2, 5}, {0, 3}, {1, 6}, {3, 4, 6}});
    std::vector<SolutionSet> sols = solve_all(inst);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].selected == std::vector<uint32_t>{0, 3, 4});
    CHECK(check_cover(inst, sols[0]));
}

TEST_CASE("check_cover rejects under- and over-covers") {
    CoverInstance inst = make_instance(3, {{0, 1}, {2}, {1, 2}, {0}});
    SolutionSet good;
    good.selected = {0, 1};
    CHECK(check_cover(inst, good));
    SolutionSet under;
    under.selected = {1};
    CHECK(!check_cover(inst, under));
    SolutionSet over;
    over.selected = {0, 1, 3};
    CHECK(!check_cover(inst, over));
    SolutionSet unknown;
    unknown.selected = {7};
    CHECK(!check_cover(inst, unknown));
}

TEST_CASE("solver output is seed-invariant as a set") {
    CoverInstance inst = make_instance(
        6, {{0, 1}, {2, 3}, {4, 5}, {0, 2, 4}, {1, 3, 5}, {0, 5}, {1, 2}, {3, 4}});
    std::set<std::vector<uint32_t>> base;
    for (const SolutionSet& s : solve_all(inst)) base.insert(s.selected);
    for (uint64_t seed : {1ull, 42ull, 12345ull}) {
        SolveOptions opts;
        opts.order_seed = seed;
        std::set<std::vector<uint32_t>> got;
        for (const SolutionSet& s : solve_all(inst, opts)) got.insert(s.selected);
        CHECK(got == base);
    }
}

TEST_CASE("solution limit and node budget are honored") {
    CoverInstance inst = make_instance(
        6, {{0, 1}, {2, 3}, {4, 5}, {0, 2, 4}, {1, 3, 5}, {0, 5}, {1, 2}, {3, 4}});
    SolveOptions one;
    one.max_solutions = 1;
    SearchStats s1 = solve(inst, one, [](const SolutionSet&) { return true; });
    CHECK(s1.solutions == 1);
    CHECK(!s1.exhaustive);

    SolveOptions tiny;
    tiny.max_nodes = 1;
    SearchStats s2 = solve(inst, tiny, [](const SolutionSet&) { return true; });
    CHECK(s2.budget_exceeded);
    CHECK(!s2.exhaustive);
}

TEST_CASE("solver count equals naive backtracking on random instances") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        uint32_t items = 1 + rng() % 30;
        uint32_t n_options = 1 + rng() % 40;
        std::vector<std::vector<uint32_t>> options;
        std::vector<uint32_t> masks;
        for (uint32_t i = 0; i < n_options; ++i) {
            uint32_t size = 1 + rng() % 4;
            std::set<uint32_t> rows;
            for (uint32_t s = 0; s < size; ++s) rows.insert(rng() % items);
            options.emplace_back(rows.begin(), rows.end());
            uint32_t mask = 0;
            for (uint32_t r : rows) mask |= 1u << r;
            masks.push_back(mask);
        }
        CoverInstance inst = make_instance(items, options);
        SearchStats stats = solve(inst, {}, [](const SolutionSet&) { return true; });
        REQUIRE(stats.exhaustive);
        CHECK(stats.solutions == oracles::count_exact_covers(items, masks));
    }
}

TEST_CASE("instance file round trip") {
    CoverInstance inst = make_instance(5, {{0, 1, 4}, {2, 3}, {1, 2, 3}});
    inst.options[1].col_id = 17; // ids need not be dense
    std::stringstream ss;
    write_instance(ss, inst);
    CoverInstance r = read_instance(ss);
    CHECK(r.items == inst.items);
    REQUIRE(r.options.size() == inst.options.size());
    for (size_t i = 0; i < r.options.size(); ++i) {
        CHECK(r.options[i].col_id == inst.options[i].col_id);
        CHECK(r.options[i].rows == inst.options[i].rows);
    }
}

TEST_CASE("to_cover excludes double-covering columns") {
    // hand-built km matrix: 2 rows, 3 cols; col 0 has an entry 2,
    // col 1 covers both rows once, col 2 covers row 1 once
    KMMatrix M;
    M.t = 2;
    M.k = 3;
    M.rows = 2;
    M.cols = 3;
    M.row_lengths = {10, 10};
    M.col_lengths = {10, 10, 10};
    M.entries = {{0, 0, 2}, {0, 1, 1}, {1, 1, 1}, {1, 2, 1}};
    M.col_begin = {0, 1, 3, 4};
    CoverInstance inst = to_cover(M);
    CHECK(inst.items == 2);
    REQUIRE(inst.excluded == std::vector<uint32_t>{0});
    REQUIRE(inst.options.size() == 2);
    CHECK(inst.options[0].col_id == 1);
    CHECK(inst.options[0].rows == std::vector<uint32_t>{0, 1});
    CHECK(inst.options[1].col_id == 2);
}

TEST_CASE("to_cover corrects for orbit lengths") {
    // a short column: entry 1 but the column orbit is 5x longer than the
    // row orbit, so selecting it covers the row five times
    KMMatrix M;
    M.t = 2;
    M.k = 3;
    M.rows = 1;
    M.cols = 2;
    M.row_lengths = {2};
    M.col_lengths = {10, 2};
    M.entries = {{0, 0, 1}, {0, 1, 1}};
    M.col_begin = {0, 1, 2};
    CoverInstance inst = to_cover(M);
    CHECK(inst.excluded == std::vector<uint32_t>{0});
    REQUIRE(inst.options.size() == 1);
    CHECK(inst.options[0].col_id == 1);

    // the reverse ratio: entry 5 on a column 5x shorter covers once
    KMMatrix R;
    R.t = 2;
    R.k = 3;
    R.rows = 1;
    R.cols = 1;
    R.row_lengths = {10};
    R.col_lengths = {2};
    R.entries = {{0, 0, 5}};
    R.col_begin = {0, 1};
    CoverInstance rinst = to_cover(R);
    CHECK(rinst.excluded.empty());
    REQUIRE(rinst.options.size() == 1);
    CHECK(rinst.options[0].rows == std::vector<uint32_t>{0});
}
