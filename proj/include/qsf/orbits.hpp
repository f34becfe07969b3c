#pragma once

// Group actions on subspaces and orbit tables.  Three groups act through the
// exponent map x -> q^j * x + c (mod q^n - 1): the cyclic shift group
// (multiplication by alpha), the Galois group (frobenius), and their
// semidirect product, the normalizer of the shift group.  Canonical forms
// are lexicographic minima over the orbit; invariant keys give a hash
// prefilter, canonical forms decide orbit identity.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "qsf/error.hpp"
#include "qsf/ffield.hpp"
#include "qsf/subspace.hpp"

namespace qsf {

enum class GroupKind { identity, galois, singer, normalizer };

inline const char* group_name(GroupKind g) {
    switch (g) {
        case GroupKind::identity:   return "identity";
        case GroupKind::galois:     return "galois";
        case GroupKind::singer:     return "singer";
        case GroupKind::normalizer: return "normalizer";
    }
    return "?";
}

inline GroupKind parse_group(const std::string& s) {
    if (s == "identity") return GroupKind::identity;
    if (s == "galois") return GroupKind::galois;
    if (s == "singer") return GroupKind::singer;
    if (s == "normalizer") return GroupKind::normalizer;
    throw Error(Errc::bad_format, "unknown group '" + s + "'");
}

struct GroupSpec {
    GroupKind kind = GroupKind::normalizer;
    const FieldTable* field = nullptr;

    uint64_t order() const {
        switch (kind) {
            case GroupKind::identity:   return 1;
            case GroupKind::galois:     return field->n();
            case GroupKind::singer:     return field->modulus();
            case GroupKind::normalizer: return uint64_t(field->n()) * field->modulus();
        }
        return 0;
    }

    // (j, c) ranges of the elements x -> q^j x + c
    uint32_t j_range() const {
        return (kind == GroupKind::galois || kind == GroupKind::normalizer) ? field->n() : 1;
    }
    uint32_t c_range() const {
        return (kind == GroupKind::singer || kind == GroupKind::normalizer) ? field->modulus() : 1;
    }
};

// Image of X under x -> q^j x + c (mod q^n - 1).
inline Subspace act(const FieldTable& F, const Subspace& X, uint32_t j, uint32_t c) {
    const uint32_t M = F.modulus();
    const uint64_t mult = F.frob_multiplier(j % F.n());
    Subspace Y;
    Y.k = X.k;
    Y.exps.resize(X.exps.size());
    for (size_t i = 0; i < X.exps.size(); ++i)
        Y.exps[i] = uint32_t((X.exps[i] * mult + c) % M);
    std::sort(Y.exps.begin(), Y.exps.end());
    return Y;
}

// rho(x) = min of the cyclotomic coset {x q^i mod q^n-1}, tabulated.
struct CyclotomicTable {
    explicit CyclotomicTable(const FieldTable& F) : rho(F.modulus()) {
        const uint32_t M = F.modulus();
        for (uint32_t x = 0; x < M; ++x) {
            uint32_t best = x;
            uint64_t y = x;
            for (uint32_t i = 1; i < F.n(); ++i) {
                y = y * F.q() % M;
                if (y < best) best = uint32_t(y);
            }
            rho[x] = best;
        }
    }
    std::vector<uint32_t> rho;
    uint32_t operator()(uint32_t x) const { return rho[x]; }
};

// Orbit invariant: sorted with multiplicities kept; the exported form
// drops them, matching set semantics.
struct InvariantKey {
    std::vector<uint32_t> multiset;

    std::vector<uint32_t> as_set() const {
        std::vector<uint32_t> s = multiset;
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }
    friend bool operator==(const InvariantKey& a, const InvariantKey& b) {
        return a.multiset == b.multiset;
    }
};

inline InvariantKey inv_F(const Subspace& X, const CyclotomicTable& ct) {
    InvariantKey key;
    key.multiset.reserve(X.exps.size());
    for (uint32_t x : X.exps) key.multiset.push_back(ct(x));
    std::sort(key.multiset.begin(), key.multiset.end());
    return key;
}

inline InvariantKey inv_S(const Subspace& X, uint32_t M) {
    InvariantKey key;
    const size_t m = X.exps.size();
    key.multiset.reserve(m * (m - 1));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            uint32_t a = X.exps[i], b = X.exps[j];
            key.multiset.push_back(a >= b ? a - b : a + M - b);
        }
    std::sort(key.multiset.begin(), key.multiset.end());
    return key;
}

inline InvariantKey inv_N(const Subspace& X, uint32_t M, const CyclotomicTable& ct) {
    InvariantKey key;
    const size_t m = X.exps.size();
    key.multiset.reserve(m * (m - 1));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            uint32_t a = X.exps[i], b = X.exps[j];
            key.multiset.push_back(ct(a >= b ? a - b : a + M - b));
        }
    std::sort(key.multiset.begin(), key.multiset.end());
    return key;
}

namespace detail {

// Lex compare of a candidate being built against the best so far.
inline bool lex_less(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

} // namespace detail

// Lexicographically smallest sorted exponent set over the orbit of X.
// For groups containing all shifts the minimum starts at 0, so it is enough
// to scan the zero-anchored images q^j (x - x_i).
inline Subspace canonical_form(const FieldTable& F, const Subspace& X, GroupKind kind) {
    if (kind == GroupKind::identity) return X;
    const uint32_t M = F.modulus();
    const size_t m = X.exps.size();
    const uint32_t jr = (kind == GroupKind::singer) ? 1 : F.n();

    std::vector<uint32_t> mapped(m), cand(m), best;
    if (kind == GroupKind::galois) {
        for (uint32_t j = 0; j < jr; ++j) {
            const uint64_t mult = F.frob_multiplier(j);
            for (size_t i = 0; i < m; ++i) cand[i] = uint32_t(X.exps[i] * mult % M);
            std::sort(cand.begin(), cand.end());
            if (best.empty() || detail::lex_less(cand, best)) best = cand;
        }
    } else {
        for (uint32_t j = 0; j < jr; ++j) {
            const uint64_t mult = F.frob_multiplier(j);
            for (size_t i = 0; i < m; ++i) mapped[i] = uint32_t(X.exps[i] * mult % M);
            for (size_t a = 0; a < m; ++a) {
                const uint32_t anchor = mapped[a];
                for (size_t i = 0; i < m; ++i) {
                    uint32_t y = mapped[i];
                    cand[i] = y >= anchor ? y - anchor : y + M - anchor;
                }
                std::sort(cand.begin(), cand.end());
                if (best.empty() || detail::lex_less(cand, best)) best = cand;
            }
        }
    }
    Subspace C;
    C.k = X.k;
    C.exps = std::move(best);
    return C;
}

// Orbit length by direct stabilizer scan: for each frobenius power the only
// viable shifts send the first mapped exponent onto some exponent of X.
inline uint64_t orbit_length(const FieldTable& F, const Subspace& X, GroupKind kind) {
    if (kind == GroupKind::identity) return 1;
    const uint32_t M = F.modulus();
    const size_t m = X.exps.size();
    uint64_t stab = 0;

    auto image_in_x = [&](uint64_t mult, uint32_t c) {
        for (size_t i = 0; i < m; ++i) {
            uint32_t y = uint32_t((X.exps[i] * mult + c) % M);
            if (!std::binary_search(X.exps.begin(), X.exps.end(), y)) return false;
        }
        return true;
    };

    if (kind == GroupKind::galois) {
        for (uint32_t j = 0; j < F.n(); ++j)
            if (image_in_x(F.frob_multiplier(j), 0)) ++stab;
        return F.n() / stab;
    }
    const uint32_t jr = (kind == GroupKind::singer) ? 1 : F.n();
    for (uint32_t j = 0; j < jr; ++j) {
        const uint64_t mult = F.frob_multiplier(j);
        const uint32_t y0 = uint32_t(X.exps[0] * mult % M);
        for (size_t t = 0; t < m; ++t) {
            uint32_t c = X.exps[t] >= y0 ? X.exps[t] - y0 : X.exps[t] + M - y0;
            if (image_in_x(mult, c)) ++stab;
        }
    }
    GroupSpec g{kind, &F};
    return g.order() / stab;
}

// Full orbit of X, deduplicated when the stabilizer is nontrivial.
inline std::vector<Subspace> orbit_members(const FieldTable& F, const Subspace& X, GroupKind kind) {
    GroupSpec g{kind, &F};
    const uint64_t len = orbit_length(F, X, kind);
    std::vector<Subspace> out;
    out.reserve(size_t(len));
    if (len == g.order()) {
        for (uint32_t j = 0; j < g.j_range(); ++j)
            for (uint32_t c = 0; c < g.c_range(); ++c) out.push_back(act(F, X, j, c));
    } else {
        std::unordered_map<Subspace, bool, SubspaceHash> seen;
        for (uint32_t j = 0; j < g.j_range(); ++j)
            for (uint32_t c = 0; c < g.c_range(); ++c) {
                Subspace Y = act(F, X, j, c);
                if (seen.emplace(Y, true).second) out.push_back(std::move(Y));
            }
    }
    return out;
}

struct VecHash {
    size_t operator()(const std::vector<uint32_t>& v) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint32_t e : v) {
            h ^= e;
            h *= 0x100000001b3ull;
        }
        return size_t(h);
    }
};

struct OrbitTableOptions {
    uint64_t budget = uint64_t(1) << 33; // max subspaces enumerated
    unsigned workers = 1;
};

// Canonical representatives, orbit lengths, and an invariant-keyed index
// for all k-subspace orbits under the chosen group.  Representative ids
// follow lex order of the canonical forms.
struct OrbitTable {
    uint32_t k = 0;
    GroupKind group = GroupKind::normalizer;
    uint32_t q = 0, n = 0;
    uint64_t group_order = 0;
    std::vector<Subspace> reps;
    std::vector<uint64_t> lengths;
    std::unordered_map<std::vector<uint32_t>, std::vector<uint32_t>, VecHash> index;
    std::unordered_map<Subspace, uint32_t, SubspaceHash> id_of;

    size_t num_orbits() const { return reps.size(); }

    uint32_t orbit_id(const FieldTable& F, const Subspace& X) const {
        Subspace c = canonical_form(F, X, group);
        auto it = id_of.find(c);
        if (it == id_of.end())
            throw Error(Errc::bad_format, "subspace not covered by orbit table: " + format_subspace(X));
        return it->second;
    }

    size_t invariant_collisions() const {
        size_t c = 0;
        for (const auto& [key, ids] : index)
            if (ids.size() > 1) ++c;
        return c;
    }
};

namespace detail {

inline InvariantKey group_invariant(const Subspace& X, GroupKind kind, uint32_t M,
                                    const CyclotomicTable* ct) {
    switch (kind) {
        case GroupKind::identity: return InvariantKey{X.exps};
        case GroupKind::galois:   return inv_F(X, *ct);
        case GroupKind::singer:   return inv_S(X, M);
        case GroupKind::normalizer: return inv_N(X, M, *ct);
    }
    return {};
}

inline void finish_orbit_table(const FieldTable& F, OrbitTable& T,
                               std::unordered_map<Subspace, uint64_t, SubspaceHash>& counts,
                               bool counts_are_lengths) {
    T.reps.reserve(counts.size());
    for (auto& [rep, cnt] : counts) T.reps.push_back(rep);
    std::sort(T.reps.begin(), T.reps.end());

    const uint64_t m = (T.reps.empty()) ? 0 : T.reps.front().exps.size();
    const uint32_t M = F.modulus();
    T.lengths.resize(T.reps.size());
    uint64_t total = 0;
    for (size_t i = 0; i < T.reps.size(); ++i) {
        uint64_t len;
        if (counts_are_lengths) {
            len = counts[T.reps[i]];
        } else {
            len = orbit_length(F, T.reps[i], T.group);
            // every orbit meets the anchor vector in len*m/M members
            if (counts[T.reps[i]] * M != len * m)
                throw std::logic_error("orbit length inconsistent with through-anchor count");
        }
        T.lengths[i] = len;
        total += len;
    }
    if (total != gauss_binom(F.n(), T.k, F.q()))
        throw std::logic_error("orbit lengths do not partition the subspace count");

    std::unique_ptr<CyclotomicTable> ct;
    if (T.group == GroupKind::galois || T.group == GroupKind::normalizer)
        ct = std::make_unique<CyclotomicTable>(F);
    for (size_t i = 0; i < T.reps.size(); ++i) {
        T.id_of.emplace(T.reps[i], uint32_t(i));
        InvariantKey key = group_invariant(T.reps[i], T.group, M, ct.get());
        T.index[key.multiset].push_back(uint32_t(i));
    }
}

} // namespace detail

inline OrbitTable build_orbit_table(const FieldTable& F, uint32_t k, GroupKind kind,
                                    const OrbitTableOptions& opts = {}) {
    OrbitTable T;
    T.k = k;
    T.group = kind;
    T.q = F.q();
    T.n = F.n();
    T.group_order = GroupSpec{kind, &F}.order();

    const bool through_anchor = (kind == GroupKind::singer || kind == GroupKind::normalizer);
    const uint64_t expected = through_anchor ? gauss_binom(F.n() - 1, k - 1, F.q())
                                             : gauss_binom(F.n(), k, F.q());
    if (expected > opts.budget)
        throw Error(Errc::budget_exceeded, "enumeration of " + std::to_string(expected) +
                                               " subspaces exceeds budget " +
                                               std::to_string(opts.budget));

    using CountMap = std::unordered_map<Subspace, uint64_t, SubspaceHash>;
    CountMap counts;

    if (!through_anchor) {
        // small-field path: full enumeration, counts are orbit lengths
        enumerate_all_subspaces(F, k, [&](const Subspace& X) {
            ++counts[canonical_form(F, X, kind)];
        });
        detail::finish_orbit_table(F, T, counts, true);
        return T;
    }

    const uint32_t M = F.modulus();
    unsigned workers = opts.workers == 0 ? 1 : opts.workers;
    if (workers <= 1 || k == 1) {
        enumerate_through(F, FElem::at(0), k, [&](const Subspace& X) {
            ++counts[canonical_form(F, X, kind)];
        });
    } else {
        const uint32_t nchunks = uint32_t(workers) * 8;
        std::vector<CountMap> partial(nchunks);
        std::atomic<uint32_t> next{0};
        auto run = [&]() {
            for (;;) {
                uint32_t chunk = next.fetch_add(1);
                if (chunk >= nchunks) return;
                uint64_t lo = uint64_t(M) * chunk / nchunks;
                uint64_t hi = uint64_t(M) * (chunk + 1) / nchunks;
                CountMap& local = partial[chunk];
                enumerate_through_range(F, FElem::at(0), k, uint32_t(lo), uint32_t(hi),
                                        [&](const Subspace& X) {
                                            ++local[canonical_form(F, X, kind)];
                                        });
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
        run();
        for (auto& t : pool) t.join();
        for (auto& part : partial)
            for (auto& [rep, cnt] : part) counts[rep] += cnt;
    }
    detail::finish_orbit_table(F, T, counts, false);
    return T;
}

// Serialization: header `q n k group order num_orbits`, then one line per
// orbit: `length<TAB>{canonical exponent set}`, lex order on the rep.
inline void write_orbit_table(std::ostream& os, const OrbitTable& T) {
    os << T.q << ' ' << T.n << ' ' << T.k << ' ' << group_name(T.group) << ' ' << T.group_order
       << ' ' << T.reps.size() << '\n';
    for (size_t i = 0; i < T.reps.size(); ++i)
        os << T.lengths[i] << '\t' << format_subspace(T.reps[i]) << '\n';
}

inline OrbitTable read_orbit_table(std::istream& is, const FieldTable& F) {
    OrbitTable T;
    std::string group;
    size_t num = 0;
    is >> T.q >> T.n >> T.k >> group >> T.group_order >> num;
    if (!is) throw Error(Errc::bad_format, "bad orbit table header");
    if (T.q != F.q() || T.n != F.n())
        throw Error(Errc::orbit_mismatch, "orbit table field differs from the loaded field");
    T.group = parse_group(group);
    std::string line;
    std::getline(is, line);
    T.reps.reserve(num);
    T.lengths.reserve(num);
    for (size_t i = 0; i < num; ++i) {
        if (!std::getline(is, line)) throw Error(Errc::bad_format, "truncated orbit table");
        size_t tab = line.find('\t');
        if (tab == std::string::npos) throw Error(Errc::bad_format, "missing tab in orbit line");
        T.lengths.push_back(std::stoull(line.substr(0, tab)));
        T.reps.push_back(parse_subspace(F, line.substr(tab + 1)));
    }
    const uint32_t M = F.modulus();
    std::unique_ptr<CyclotomicTable> ct;
    if (T.group == GroupKind::galois || T.group == GroupKind::normalizer)
        ct = std::make_unique<CyclotomicTable>(F);
    for (size_t i = 0; i < T.reps.size(); ++i) {
        T.id_of.emplace(T.reps[i], uint32_t(i));
        InvariantKey key = detail::group_invariant(T.reps[i], T.group, M, ct.get());
        T.index[key.multiset].push_back(uint32_t(i));
    }
    return T;
}

} // namespace qsf
