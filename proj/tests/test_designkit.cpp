#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qsf/designkit.hpp"

using namespace qsf;

namespace {

FieldTable f2_4() { return build_field(parse_polynomial(2, 4, "4,1,0")); }
FieldTable f2_5() { return build_field(parse_polynomial(2, 5, "5,2,0")); }

} // namespace

TEST_CASE("expand under the identity group returns the reps themselves") {
    FieldTable F = f2_4();
    Subspace a = span_of(F, {FElem::at(0), FElem::at(1)});
    Subspace b = span_of(F, {FElem::at(2), FElem::at(7)});
    Design D = expand(F, {a, b}, GroupKind::identity, 1);
    REQUIRE(D.num_blocks() == 2);
    std::vector<Subspace> blocks{D.block_subspace(0), D.block_subspace(1)};
    std::sort(blocks.begin(), blocks.end());
    std::vector<Subspace> expect{a, b};
    std::sort(expect.begin(), expect.end());
    CHECK(blocks == expect);
}

TEST_CASE("a spread from a short shift orbit") {
    // F_4 sits inside F_16 as {0, alpha^0, alpha^5, alpha^10}; its shift
    // orbit has length 5 and partitions the nonzero vectors
    FieldTable F = f2_4();
    Subspace subfield{2, {0, 5, 10}};
    REQUIRE(is_subspace(F, subfield.exps));
    CHECK(orbit_length(F, subfield, GroupKind::singer) == 5);
    Design D = expand(F, {subfield}, GroupKind::singer, 1);
    CHECK(D.num_blocks() == 5);
    SteinerVerdict V = verify_steiner(F, D);
    CHECK(V.accepted);
    CHECK(V.total_t_subspaces == 15);
    CHECK(V.histogram.at(1) == 15);
}

TEST_CASE("the k = n design is a q-Steiner system for every t") {
    FieldTable F = f2_4();
    Subspace whole;
    whole.k = 4;
    whole.exps.resize(15);
    for (uint32_t e = 0; e < 15; ++e) whole.exps[e] = e;
    Design D = expand(F, {whole}, GroupKind::identity, 2);
    SteinerVerdict V = verify_steiner(F, D);
    CHECK(V.accepted);
    CHECK(V.covered_once == gauss_binom(4, 2, 2));
    CodeSizeReport R = report_code_size(D, V);
    CHECK(R.size == 1);

    D.t = 3;
    SteinerVerdict V3 = verify_steiner(F, D);
    CHECK(V3.accepted);
    CHECK(V3.covered_once == gauss_binom(4, 3, 2));
}

TEST_CASE("the t = k design over F_2^5 verifies and loses one block loudly") {
    FieldTable F = f2_5();
    OrbitTable T = build_orbit_table(F, 2, GroupKind::singer);
    Design D = expand(F, T.reps, GroupKind::singer, 2);
    CHECK(D.num_blocks() == gauss_binom(5, 2, 2));
    SteinerVerdict V = verify_steiner(F, D);
    CHECK(V.accepted);

    // drop the last block
    Design broken = D;
    broken.flat.resize(broken.flat.size() - broken.block_size);
    SteinerVerdict W = verify_steiner(F, broken);
    CHECK(!W.accepted);
    CHECK(W.covered_zero == 1);
    CHECK(W.covered_multi == 0);
}

TEST_CASE("report_code_size refuses rejected designs") {
    FieldTable F = f2_5();
    OrbitTable T = build_orbit_table(F, 2, GroupKind::singer);
    Design D = expand(F, {T.reps[0]}, GroupKind::singer, 2);
    SteinerVerdict V = verify_steiner(F, D);
    REQUIRE(!V.accepted);
    CHECK_THROWS_AS(report_code_size(D, V), Error);
}

TEST_CASE("verify_df on a hand-built (7,3,1) family") {
    DifferenceFamily F;
    F.v = 7;
    F.block_size = 3;
    F.lambda = 1;
    F.blocks = {{1, 2, 4}};
    DFVerdict V = verify_df(F);
    CHECK(V.accepted);
    CHECK(V.total_differences == 6);

    DifferenceFamily empty;
    empty.v = 1;
    empty.block_size = 3;
    empty.lambda = 1;
    CHECK(verify_df(empty).accepted); // vacuous

    DifferenceFamily missing = F;
    missing.blocks.clear();
    DFVerdict W = verify_df(missing);
    CHECK(!W.accepted);
    CHECK(W.residues_under == 6);

    DifferenceFamily doubled = F;
    doubled.blocks.push_back({1, 2, 4});
    CHECK(!verify_df(doubled).accepted);
}

TEST_CASE("extract_df wants coprime dimensions and q = 2") {
    FieldTable F = f2_4();
    Subspace subfield{2, {0, 5, 10}};
    Design spread = expand(F, {subfield}, GroupKind::singer, 1);
    try {
        extract_df(F, spread);
        FAIL("expected NotCoprime");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_coprime); // gcd(2,4) = 2
    }

    FieldTable F3 = build_field(parse_polynomial(3, 4, "2,1,0,0,1"));
    Subspace line = span_of(F3, {FElem::at(0), FElem::at(1)});
    Design D3 = expand(F3, {line}, GroupKind::singer, 1);
    D3.k = 3; // coprime with n = 4
    try {
        extract_df(F3, D3);
        FAIL("expected WrongCharacteristic");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::wrong_characteristic);
    }
}

TEST_CASE("extract_df partitions a shift-invariant design into orbit blocks") {
    FieldTable F = f2_5();
    Subspace X = span_of(F, {FElem::at(0), FElem::at(1), FElem::at(3)});
    REQUIRE(X.k == 3); // gcd(3,5) = 1
    Design D = expand(F, {X}, GroupKind::singer, 2);
    CHECK(D.num_blocks() == 31);
    DifferenceFamily DF = extract_df(F, D);
    CHECK(DF.v == 31);
    CHECK(DF.block_size == 7);
    REQUIRE(DF.blocks.size() == 1);
    // one representative of the single shift orbit, as plain exponents
    CHECK(DF.blocks[0] == canonical_form(F, X, GroupKind::singer).exps);

    // a design that is not shift-invariant is refused
    Design half = D;
    half.flat.resize(half.flat.size() - half.block_size);
    CHECK_THROWS_AS(extract_df(F, half), Error);
}

TEST_CASE("extract_df_from_reps adjoins the frobenius multiples") {
    FieldTable F = f2_5();
    Subspace X = span_of(F, {FElem::at(0), FElem::at(1), FElem::at(3)});
    Design D = expand(F, {X}, GroupKind::normalizer, 2);
    DifferenceFamily a = extract_df(F, D);
    DifferenceFamily b = extract_df_from_reps(F, {X}, GroupKind::normalizer);
    CHECK(a.blocks.size() == b.blocks.size());
    // same orbit partition: canonical forms of the blocks agree
    auto canon = [&](const DifferenceFamily& df) {
        std::vector<std::vector<uint32_t>> out;
        for (const auto& blk : df.blocks) {
            Subspace s{3, blk};
            out.push_back(canonical_form(F, s, GroupKind::singer).exps);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    CHECK(canon(a) == canon(b));
}

TEST_CASE("design and difference family files round trip") {
    FieldTable F = f2_5();
    Subspace X = span_of(F, {FElem::at(0), FElem::at(1), FElem::at(3)});
    Design D = expand(F, {X}, GroupKind::singer, 2);
    std::stringstream ss;
    write_design(ss, D);
    Design R = read_design(ss, F);
    CHECK(R.flat == D.flat);
    CHECK(R.t == D.t);

    DifferenceFamily DF = extract_df(F, D);
    std::stringstream ds;
    write_df(ds, DF);
    DifferenceFamily RF = read_df(ds);
    CHECK(RF.v == DF.v);
    CHECK(RF.blocks == DF.blocks);
}
