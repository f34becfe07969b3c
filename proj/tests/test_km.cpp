#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qsf/km.hpp"

using namespace qsf;

namespace {

FieldTable f2_7() { return build_field(parse_polynomial(2, 7, "7,1,0")); }

uint64_t column_sum(const KMMatrix& M, uint32_t j) {
    uint64_t s = 0;
    for (size_t idx = M.col_begin[j]; idx < M.col_begin[j + 1]; ++idx)
        s += M.entries[idx].value;
    return s;
}

} // namespace

TEST_CASE("km columns sum to [k choose t]_q") {
    FieldTable F = f2_7();
    for (GroupKind kind : {GroupKind::singer, GroupKind::galois}) {
        OrbitTable rows = build_orbit_table(F, 2, kind);
        OrbitTable cols = build_orbit_table(F, 3, kind);
        KMMatrix M = build_km(F, rows, cols);
        CHECK(M.rows == rows.num_orbits());
        CHECK(M.cols == cols.num_orbits());
        for (uint32_t j = 0; j < M.cols; ++j)
            CHECK(column_sum(M, j) == gauss_binom(3, 2, 2));
    }
}

TEST_CASE("t = k gives an identity-like matrix") {
    FieldTable F = f2_7();
    OrbitTable T = build_orbit_table(F, 2, GroupKind::singer);
    KMMatrix M = build_km(F, T, T);
    REQUIRE(M.entries.size() == T.num_orbits());
    for (const KMTriplet& e : M.entries) {
        CHECK(e.row == e.col);
        CHECK(e.value == 1);
    }
}

TEST_CASE("incidence double count on F_2^7 by brute force") {
    FieldTable F = f2_7();
    OrbitTable rows = build_orbit_table(F, 2, GroupKind::singer);
    OrbitTable cols = build_orbit_table(F, 3, GroupKind::singer);
    KMMatrix M = build_km(F, rows, cols);

    // P[i][j] = number of k-subspaces in orbit j containing the rep of orbit i
    std::vector<std::vector<uint64_t>> P(M.rows, std::vector<uint64_t>(M.cols, 0));
    for (uint32_t j = 0; j < M.cols; ++j) {
        for (const Subspace& blk : orbit_members(F, cols.reps[j], GroupKind::singer)) {
            for (uint32_t i = 0; i < M.rows; ++i) {
                const auto& t_exps = rows.reps[i].exps;
                if (std::includes(blk.exps.begin(), blk.exps.end(), t_exps.begin(), t_exps.end()))
                    ++P[i][j];
            }
        }
    }
    std::vector<std::vector<uint64_t>> E(M.rows, std::vector<uint64_t>(M.cols, 0));
    for (const KMTriplet& e : M.entries) E[e.row][e.col] = e.value;
    for (uint32_t i = 0; i < M.rows; ++i)
        for (uint32_t j = 0; j < M.cols; ++j)
            CHECK(rows.lengths[i] * P[i][j] == cols.lengths[j] * E[i][j]);
}

TEST_CASE("rebuilding yields bit-identical serialization") {
    FieldTable F = f2_7();
    OrbitTable rows = build_orbit_table(F, 2, GroupKind::normalizer);
    OrbitTable cols = build_orbit_table(F, 3, GroupKind::normalizer);
    std::stringstream a, b;
    write_km(a, build_km(F, rows, cols));
    write_km(b, build_km(F, rows, cols, 3)); // workers must not change bytes
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("km serialization round trip") {
    FieldTable F = f2_7();
    OrbitTable rows = build_orbit_table(F, 2, GroupKind::singer);
    OrbitTable cols = build_orbit_table(F, 3, GroupKind::singer);
    KMMatrix M = build_km(F, rows, cols);
    std::stringstream ss;
    write_km(ss, M);
    KMMatrix R = read_km(ss);
    CHECK(R.rows == M.rows);
    CHECK(R.cols == M.cols);
    CHECK(R.entries.size() == M.entries.size());
    CHECK(R.col_begin == M.col_begin);
}

TEST_CASE("mismatched orbit tables are rejected") {
    FieldTable F = f2_7();
    OrbitTable rows = build_orbit_table(F, 2, GroupKind::singer);
    OrbitTable cols = build_orbit_table(F, 3, GroupKind::galois);
    try {
        build_km(F, rows, cols);
        FAIL("expected OrbitMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::orbit_mismatch);
    }
}
