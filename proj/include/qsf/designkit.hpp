#pragma once

// Expansion of orbit solutions to full block lists, verification of the
// q-Steiner property, and extraction/verification of difference families.
// The Steiner verifier counts raw t-subspace coverage by hashing, with no
// canonicalization, so it cross-checks the whole orbit pipeline.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qsf/cover.hpp"
#include "qsf/error.hpp"
#include "qsf/ffield.hpp"
#include "qsf/orbits.hpp"
#include "qsf/subspace.hpp"

namespace qsf {

// Block list with flat storage: every block is a sorted run of q^k - 1
// exponents, blocks sorted lexicographically.
struct Design {
    uint32_t q = 0, t = 0, k = 0, n = 0;
    uint32_t block_size = 0; // q^k - 1
    std::vector<uint32_t> flat;

    size_t num_blocks() const { return block_size ? flat.size() / block_size : 0; }
    const uint32_t* block(size_t i) const { return flat.data() + i * block_size; }

    Subspace block_subspace(size_t i) const {
        Subspace s;
        s.k = k;
        s.exps.assign(block(i), block(i) + block_size);
        return s;
    }
};

namespace detail {

inline void sort_blocks(Design& D) {
    const uint32_t m = D.block_size;
    const size_t count = D.num_blocks();
    std::vector<uint32_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0u);
    const uint32_t* base = D.flat.data();
    std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
        return std::lexicographical_compare(base + size_t(a) * m, base + size_t(a) * m + m,
                                            base + size_t(b) * m, base + size_t(b) * m + m);
    });
    std::vector<uint32_t> out;
    out.reserve(D.flat.size());
    for (size_t i = 0; i < count; ++i) {
        const uint32_t* b = base + size_t(idx[i]) * m;
        if (i > 0) {
            const uint32_t* prev = out.data() + out.size() - m;
            if (std::equal(b, b + m, prev)) continue; // short orbits revisit blocks
        }
        out.insert(out.end(), b, b + m);
    }
    D.flat = std::move(out);
}

} // namespace detail

// Union of the full orbits of the selected representatives.
inline Design expand(const FieldTable& F, const std::vector<Subspace>& reps, GroupKind kind,
                     uint32_t t) {
    Design D;
    D.q = F.q();
    D.n = F.n();
    D.t = t;
    D.k = reps.empty() ? 0 : reps.front().k;
    D.block_size = reps.empty() ? 0 : uint32_t(reps.front().exps.size());

    GroupSpec g{kind, &F};
    uint64_t cap = [&] {
        uint64_t total = 0;
        for (const Subspace& r : reps) total += orbit_length(F, r, kind);
        return total;
    }();
    D.flat.reserve(size_t(cap) * D.block_size);

    const uint32_t M = F.modulus();
    std::vector<uint32_t> buf(D.block_size);
    for (const Subspace& rep : reps) {
        if (rep.exps.size() != D.block_size)
            throw Error(Errc::bad_format, "mixed block dimensions in solution");
        for (uint32_t j = 0; j < g.j_range(); ++j) {
            const uint64_t mult = F.frob_multiplier(j);
            for (uint32_t c = 0; c < g.c_range(); ++c) {
                for (size_t i = 0; i < buf.size(); ++i)
                    buf[i] = uint32_t((rep.exps[i] * mult + c) % M);
                std::sort(buf.begin(), buf.end());
                D.flat.insert(D.flat.end(), buf.begin(), buf.end());
            }
        }
    }
    detail::sort_blocks(D);
    return D;
}

inline Design expand(const FieldTable& F, const SolutionSet& sol, const OrbitTable& k_orbits,
                     uint32_t t) {
    std::vector<Subspace> reps;
    reps.reserve(sol.selected.size());
    for (uint32_t col : sol.selected) {
        if (col >= k_orbits.num_orbits())
            throw Error(Errc::bad_format, "solution column out of range");
        reps.push_back(k_orbits.reps[col]);
    }
    return expand(F, reps, k_orbits.group, t);
}

struct SteinerVerdict {
    bool accepted = false;
    uint64_t total_t_subspaces = 0;
    uint64_t covered_once = 0;
    uint64_t covered_zero = 0;
    uint64_t covered_multi = 0;
    std::map<uint32_t, uint64_t> histogram; // coverage count -> #t-subspaces
};

// Accepts iff every t-subspace of the ambient space is covered exactly once.
// Over F_2 with t=2 a 2-subspace is the triple {a,b,a+b}, identified by its
// two smallest exponents, so counting uses a flat pair-indexed array; other
// parameters go through a hash map keyed by the sorted exponent set.
inline SteinerVerdict verify_steiner(const FieldTable& F, const Design& D) {
    SteinerVerdict V;
    V.total_t_subspaces = gauss_binom(D.n, D.t, D.q);
    const uint32_t M = F.modulus();

    auto tally = [&](uint64_t count_value, uint64_t how_many) {
        if (how_many == 0) return;
        V.histogram[uint32_t(count_value)] += how_many;
        if (count_value == 1)
            V.covered_once += how_many;
        else if (count_value >= 2)
            V.covered_multi += how_many;
    };

    if (D.q == 2 && D.t == 2 && uint64_t(M) * M <= (uint64_t(1) << 28)) {
        std::vector<uint8_t> counts(size_t(M) * M, 0);
        const uint32_t m = D.block_size;
        for (size_t b = 0; b < D.num_blocks(); ++b) {
            const uint32_t* blk = D.block(b);
            for (uint32_t i = 0; i < m; ++i)
                for (uint32_t j = i + 1; j < m; ++j) {
                    uint32_t s = F.add_exp(blk[i], blk[j]);
                    // count each triple once, at its two smallest members
                    if (s < blk[j]) continue;
                    uint8_t& c = counts[size_t(blk[i]) * M + blk[j]];
                    if (c != 255) ++c;
                }
        }
        std::map<uint32_t, uint64_t> hist;
        for (uint8_t c : counts)
            if (c) ++hist[c];
        for (auto& [cnt, num] : hist) tally(cnt, num);
    } else {
        std::unordered_map<std::vector<uint32_t>, uint32_t, VecHash> counts;
        for (size_t b = 0; b < D.num_blocks(); ++b) {
            for (const Subspace& ts : t_subspaces(F, D.block_subspace(b), D.t)) ++counts[ts.exps];
        }
        std::map<uint32_t, uint64_t> hist;
        for (auto& [key, c] : counts) ++hist[c];
        for (auto& [cnt, num] : hist) tally(cnt, num);
    }
    uint64_t covered = V.covered_once + V.covered_multi;
    V.covered_zero = V.total_t_subspaces - covered;
    if (V.covered_zero) V.histogram[0] = V.covered_zero;
    V.accepted = (V.covered_once == V.total_t_subspaces && V.covered_multi == 0);
    return V;
}

struct DifferenceFamily {
    uint64_t v = 0;       // group order
    uint32_t block_size = 0;
    uint32_t lambda = 1;
    std::vector<std::vector<uint32_t>> blocks;
};

namespace detail {

inline uint32_t gcd32(uint32_t a, uint32_t b) {
    while (b) {
        uint32_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace detail

// One block per shift-orbit of the design, mapped to residues: over F_2 the
// block of a subspace is its exponent set; for general q (experimental) the
// exponents collapse to projective residues mod (q^n-1)/(q-1).
inline DifferenceFamily extract_df(const FieldTable& F, const Design& D,
                                   bool allow_general_q = false) {
    if (D.q != 2 && !allow_general_q)
        throw Error(Errc::wrong_characteristic, "difference-family extraction expects q = 2");
    if (detail::gcd32(D.k, D.n) != 1)
        throw Error(Errc::not_coprime, "k and n must be coprime");

    // partition blocks into shift orbits; the design must be shift-invariant
    std::unordered_map<Subspace, uint64_t, SubspaceHash> by_orbit;
    for (size_t b = 0; b < D.num_blocks(); ++b)
        ++by_orbit[canonical_form(F, D.block_subspace(b), GroupKind::singer)];

    uint64_t accounted = 0;
    std::vector<Subspace> reps;
    reps.reserve(by_orbit.size());
    for (auto& [rep, cnt] : by_orbit) {
        uint64_t len = orbit_length(F, rep, GroupKind::singer);
        if (cnt != len)
            throw Error(Errc::bad_format, "design is not invariant under the shift group");
        accounted += cnt;
        reps.push_back(rep);
    }
    if (accounted != D.num_blocks())
        throw std::logic_error("orbit partition does not account for all blocks");
    std::sort(reps.begin(), reps.end());

    DifferenceFamily DF;
    DF.lambda = 1;
    if (D.q == 2) {
        DF.v = F.modulus();
        DF.block_size = D.block_size;
        for (const Subspace& r : reps) DF.blocks.push_back(r.exps);
    } else {
        const uint32_t vp = F.modulus() / (F.q() - 1);
        DF.v = vp;
        DF.block_size = (D.block_size) / (F.q() - 1);
        for (const Subspace& r : reps) {
            std::vector<uint32_t> blk;
            blk.reserve(DF.block_size);
            for (uint32_t e : r.exps) blk.push_back(e % vp);
            std::sort(blk.begin(), blk.end());
            blk.erase(std::unique(blk.begin(), blk.end()), blk.end());
            if (blk.size() != DF.block_size)
                throw std::logic_error("projective block has unexpected size");
            DF.blocks.push_back(std::move(blk));
        }
    }
    return DF;
}

// The published construction route: take the k-orbit representatives of a
// solution under the full normalizer and adjoin the n frobenius multiples of
// each, giving one representative per shift orbit.
inline DifferenceFamily extract_df_from_reps(const FieldTable& F, const std::vector<Subspace>& reps,
                                             GroupKind source_group, bool allow_general_q = false) {
    if (F.q() != 2 && !allow_general_q)
        throw Error(Errc::wrong_characteristic, "difference-family extraction expects q = 2");
    if (reps.empty()) return {};
    const uint32_t k = reps.front().k;
    if (detail::gcd32(k, F.n()) != 1) throw Error(Errc::not_coprime, "k and n must be coprime");
    if (source_group != GroupKind::singer && source_group != GroupKind::normalizer)
        throw Error(Errc::bad_format, "difference families need a shift-invariant design");

    std::vector<Subspace> shift_reps;
    if (source_group == GroupKind::singer) {
        shift_reps = reps;
    } else {
        std::unordered_map<Subspace, bool, SubspaceHash> seen;
        for (const Subspace& r : reps)
            for (uint32_t j = 0; j < F.n(); ++j) {
                Subspace img = act(F, r, j, 0);
                if (seen.emplace(canonical_form(F, img, GroupKind::singer), true).second)
                    shift_reps.push_back(std::move(img));
            }
    }

    DifferenceFamily DF;
    DF.lambda = 1;
    if (F.q() == 2) {
        DF.v = F.modulus();
        DF.block_size = uint32_t(reps.front().exps.size());
        for (const Subspace& r : shift_reps) DF.blocks.push_back(r.exps);
    } else {
        const uint32_t vp = F.modulus() / (F.q() - 1);
        DF.v = vp;
        DF.block_size = uint32_t(reps.front().exps.size()) / (F.q() - 1);
        for (const Subspace& r : shift_reps) {
            std::vector<uint32_t> blk;
            for (uint32_t e : r.exps) blk.push_back(e % vp);
            std::sort(blk.begin(), blk.end());
            blk.erase(std::unique(blk.begin(), blk.end()), blk.end());
            DF.blocks.push_back(std::move(blk));
        }
    }
    std::sort(DF.blocks.begin(), DF.blocks.end());
    return DF;
}

struct DFVerdict {
    bool accepted = false;
    uint64_t total_differences = 0;
    uint64_t residues_under = 0; // nonzero residues hit fewer than lambda times
    uint64_t residues_over = 0;
};

// Accepts iff the multiset of within-block differences hits every nonzero
// residue exactly lambda times.
inline DFVerdict verify_df(const DifferenceFamily& F) {
    DFVerdict V;
    // double-count precheck: sum of m(m-1) must equal lambda*(v-1)
    uint64_t expected = uint64_t(F.lambda) * (F.v - 1);
    for (const auto& blk : F.blocks) V.total_differences += uint64_t(blk.size()) * (blk.size() - 1);
    std::vector<uint32_t> count(size_t(F.v), 0);
    for (const auto& blk : F.blocks)
        for (size_t i = 0; i < blk.size(); ++i)
            for (size_t j = 0; j < blk.size(); ++j) {
                if (i == j) continue;
                uint64_t d = blk[i] >= blk[j] ? blk[i] - blk[j] : blk[i] + F.v - blk[j];
                ++count[size_t(d)];
            }
    for (uint64_t r = 1; r < F.v; ++r) {
        if (count[size_t(r)] < F.lambda) ++V.residues_under;
        if (count[size_t(r)] > F.lambda) ++V.residues_over;
    }
    V.accepted = (V.total_differences == expected && V.residues_under == 0 && V.residues_over == 0);
    return V;
}

struct CodeSizeReport {
    uint64_t size = 0;
    uint32_t n = 0;
    uint32_t distance = 0;
    uint32_t dimension = 0;
};

// Block count of an accepted design, labeled as the size of the constant-
// dimension subspace code it realizes; no distance computation is performed.
inline CodeSizeReport report_code_size(const Design& D, const SteinerVerdict& verdict) {
    if (!verdict.accepted)
        throw Error(Errc::bad_format, "code size is only reported for verified designs");
    CodeSizeReport R;
    R.size = D.num_blocks();
    R.n = D.n;
    R.dimension = D.k;
    R.distance = 2 * (D.k - D.t + 1);
    return R;
}

// design file: header `q t k n count`, then one block per line in brace form
inline void write_design(std::ostream& os, const Design& D) {
    os << D.q << ' ' << D.t << ' ' << D.k << ' ' << D.n << ' ' << D.num_blocks() << '\n';
    for (size_t b = 0; b < D.num_blocks(); ++b) {
        const uint32_t* blk = D.block(b);
        os << '{';
        for (uint32_t i = 0; i < D.block_size; ++i) {
            if (i) os << ',';
            os << blk[i];
        }
        os << "}\n";
    }
}

inline Design read_design(std::istream& is, const FieldTable& F) {
    Design D;
    size_t count = 0;
    is >> D.q >> D.t >> D.k >> D.n >> count;
    if (!is) throw Error(Errc::bad_format, "bad design header");
    if (D.q != F.q() || D.n != F.n())
        throw Error(Errc::orbit_mismatch, "design field differs from the loaded field");
    uint64_t m = 1;
    for (uint32_t i = 0; i < D.k; ++i) m *= D.q;
    D.block_size = uint32_t(m - 1);
    std::string line;
    std::getline(is, line);
    D.flat.reserve(count * D.block_size);
    for (size_t b = 0; b < count; ++b) {
        if (!std::getline(is, line)) throw Error(Errc::bad_format, "truncated design file");
        Subspace s = parse_subspace(F, line);
        if (s.exps.size() != D.block_size)
            throw Error(Errc::bad_format, "block has wrong size: " + line);
        D.flat.insert(D.flat.end(), s.exps.begin(), s.exps.end());
    }
    return D;
}

// difference family file: header `v k lambda`, then comma-separated residues
inline void write_df(std::ostream& os, const DifferenceFamily& F) {
    os << F.v << ' ' << F.block_size << ' ' << F.lambda << '\n';
    for (const auto& blk : F.blocks) {
        for (size_t i = 0; i < blk.size(); ++i) {
            if (i) os << ',';
            os << blk[i];
        }
        os << '\n';
    }
}

inline DifferenceFamily read_df(std::istream& is) {
    DifferenceFamily F;
    is >> F.v >> F.block_size >> F.lambda;
    if (!is) throw Error(Errc::bad_format, "bad difference family header");
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<uint32_t> blk;
        size_t pos = 0;
        while (pos < line.size()) {
            size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            blk.push_back(uint32_t(std::stoul(line.substr(pos, comma - pos))));
            pos = comma + 1;
        }
        if (blk.size() != F.block_size) throw Error(Errc::bad_format, "block has wrong size");
        F.blocks.push_back(std::move(blk));
    }
    return F;
}

} // namespace qsf
