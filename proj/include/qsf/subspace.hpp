#pragma once

// k-subspaces of GF(q)^n represented as the sorted exponent set of their
// nonzero vectors, |exps| = q^k - 1.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qsf/error.hpp"
#include "qsf/ffield.hpp"

namespace qsf {

struct Subspace {
    uint32_t k = 0;
    std::vector<uint32_t> exps; // sorted ascending, duplicate-free

    friend bool operator==(const Subspace& a, const Subspace& b) { return a.exps == b.exps; }
    friend bool operator!=(const Subspace& a, const Subspace& b) { return !(a == b); }
    friend bool operator<(const Subspace& a, const Subspace& b) { return a.exps < b.exps; }
};

struct SubspaceHash {
    size_t operator()(const Subspace& s) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint32_t e : s.exps) {
            h ^= e;
            h *= 0x100000001b3ull;
        }
        return size_t(h);
    }
};

// Exact Gaussian binomial [n choose k]_q.
inline uint64_t gauss_binom(uint32_t n, uint32_t k, uint32_t q) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    uint64_t qn = 1, qk = 1;
    for (uint32_t i = 0; i < n; ++i) qn *= q; // q^n
    uint64_t num = qn;                        // q^(n-i)
    for (uint32_t i = 0; i < k; ++i) {
        qk *= q; // q^(i+1)
        r = r * (num - 1) / (qk - 1);
        if (r > (unsigned __int128)UINT64_MAX)
            throw std::overflow_error("gauss_binom exceeds 64 bits");
        num /= q;
    }
    return uint64_t(r);
}

namespace detail {

inline uint32_t dim_from_size(uint64_t nonzero_count, uint32_t q) {
    uint64_t m = 1;
    uint32_t k = 0;
    while (m - 1 < nonzero_count) {
        m *= q;
        ++k;
    }
    return k; // exact only when nonzero_count = q^k - 1; callers validate sizes
}

} // namespace detail

// Closure of a generator list under addition and scalar multiplication.
inline Subspace span_of(const FieldTable& F, const std::vector<FElem>& generators) {
    std::vector<uint32_t> elems; // nonzero exponents, sorted
    const uint32_t stride = F.scalar_stride();
    const uint32_t q = F.q();
    auto contains = [&](uint32_t e) {
        return std::binary_search(elems.begin(), elems.end(), e);
    };
    for (FElem g : generators) {
        if (g.is_zero() || contains(g.exp())) continue;
        std::vector<uint32_t> grown;
        grown.reserve((elems.size() + 1) * q - 1);
        grown = elems;
        for (uint32_t a = 0; a < q - 1; ++a) {
            uint32_t ge = g.exp() + a * stride;
            if (ge >= F.modulus()) ge -= F.modulus();
            grown.push_back(ge); // 0 + a*g
            for (uint32_t e : elems) {
                uint32_t s = F.add_exp(e, ge);
                if (s != kNoExponent) grown.push_back(s);
            }
        }
        std::sort(grown.begin(), grown.end());
        elems = std::move(grown);
    }
    Subspace X;
    X.exps = std::move(elems);
    X.k = detail::dim_from_size(X.exps.size(), q);
    return X;
}

// True iff exps is exactly the nonzero-vector set of a subspace.
inline bool is_subspace(const FieldTable& F, const std::vector<uint32_t>& exps) {
    std::vector<uint32_t> sorted = exps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (uint32_t e : sorted)
        if (e >= F.modulus()) return false;
    uint64_t m = 1;
    uint32_t k = 0;
    while (m - 1 < sorted.size()) {
        m *= F.q();
        ++k;
    }
    if (m - 1 != sorted.size()) return false;
    std::vector<FElem> gens;
    gens.reserve(sorted.size());
    for (uint32_t e : sorted) gens.push_back(FElem::at(e));
    Subspace s = span_of(F, gens);
    return s.exps == sorted;
}

namespace detail {

// Coordinates of every element of X with respect to a greedy basis, as a
// packed base-q index -> exponent table (index 0 = zero vector).
struct CoordChart {
    uint32_t k = 0;
    std::vector<uint32_t> elem_of; // size q^k, kNoExponent marks the zero vector
};

inline CoordChart coord_chart(const FieldTable& F, const Subspace& X) {
    std::vector<uint32_t> basis;
    {
        std::vector<FElem> acc;
        Subspace cur; // span of basis so far
        for (uint32_t e : X.exps) {
            if (std::binary_search(cur.exps.begin(), cur.exps.end(), e)) continue;
            basis.push_back(e);
            acc.push_back(FElem::at(e));
            cur = span_of(F, acc);
            if (cur.exps.size() == X.exps.size()) break;
        }
    }
    uint32_t k = uint32_t(basis.size());
    uint64_t total = 1;
    for (uint32_t i = 0; i < k; ++i) total *= F.q();
    CoordChart chart;
    chart.k = k;
    chart.elem_of.assign(size_t(total), kNoExponent);
    // odometer over coefficient tuples
    std::vector<uint32_t> digits(k, 0);
    for (uint64_t idx = 1; idx < total; ++idx) {
        uint32_t i = 0;
        while (digits[i] == F.q() - 1) {
            digits[i] = 0;
            ++i;
        }
        ++digits[i];
        FElem v = FElem::zero();
        for (uint32_t j = 0; j < k; ++j) {
            if (digits[j] == 0) continue;
            uint32_t ge = basis[j] + (digits[j] - 1) * F.scalar_stride();
            if (ge >= F.modulus()) ge -= F.modulus();
            v = F.add(v, FElem::at(ge));
        }
        chart.elem_of[size_t(idx)] = v.exp();
    }
    return chart;
}

} // namespace detail

// All t-dimensional subspaces of X, enumerated via reduced-echelon forms
// over the coordinate chart of X.  Count = [k choose t]_q.
inline std::vector<Subspace> t_subspaces(const FieldTable& F, const Subspace& X, uint32_t t) {
    const uint32_t k = X.k;
    if (t < 1 || t > k) throw Error(Errc::bad_format, "t out of range");
    if (t == k) return {X};
    const uint32_t q = F.q();

    detail::CoordChart chart = detail::coord_chart(F, X);
    std::vector<Subspace> out;
    out.reserve(size_t(gauss_binom(k, t, q)));

    // choose pivot columns c_0 < ... < c_{t-1}
    std::vector<uint32_t> pivots(t);
    for (uint32_t i = 0; i < t; ++i) pivots[i] = i;
    std::vector<uint32_t> rows(size_t(t) * k);

    auto emit_for_pivots = [&]() {
        // free positions: row i, column c with c > pivots[i], c not a pivot
        std::vector<std::pair<uint32_t, uint32_t>> free_pos;
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t c = pivots[i] + 1; c < k; ++c)
                if (!std::binary_search(pivots.begin(), pivots.end(), c))
                    free_pos.emplace_back(i, c);
        std::vector<uint32_t> vals(free_pos.size(), 0);
        while (true) {
            std::fill(rows.begin(), rows.end(), 0);
            for (uint32_t i = 0; i < t; ++i) rows[size_t(i) * k + pivots[i]] = 1;
            for (size_t f = 0; f < free_pos.size(); ++f)
                rows[size_t(free_pos[f].first) * k + free_pos[f].second] = vals[f];

            // row space: all q^t combinations, mapped through the chart
            Subspace S;
            S.k = t;
            uint64_t combos = 1;
            for (uint32_t i = 0; i < t; ++i) combos *= q;
            std::vector<uint32_t> coef(t, 0);
            for (uint64_t c = 1; c < combos; ++c) {
                uint32_t i = 0;
                while (coef[i] == q - 1) {
                    coef[i] = 0;
                    ++i;
                }
                ++coef[i];
                uint64_t packed = 0, pw = 1;
                for (uint32_t col = 0; col < k; ++col) {
                    uint32_t d = 0;
                    for (uint32_t r = 0; r < t; ++r) d += coef[r] * rows[size_t(r) * k + col];
                    packed += (d % q) * pw;
                    pw *= q;
                }
                S.exps.push_back(chart.elem_of[size_t(packed)]);
            }
            std::sort(S.exps.begin(), S.exps.end());
            out.push_back(std::move(S));

            size_t f = 0;
            while (f < vals.size() && vals[f] == q - 1) vals[f++] = 0;
            if (f == vals.size()) break;
            ++vals[f];
        }
    };

    while (true) {
        emit_for_pivots();
        // next pivot combination
        int i = int(t) - 1;
        while (i >= 0 && pivots[size_t(i)] == k - t + uint32_t(i)) --i;
        if (i < 0) break;
        ++pivots[size_t(i)];
        for (uint32_t j = uint32_t(i) + 1; j < t; ++j) pivots[j] = pivots[j - 1] + 1;
    }
    return out;
}

namespace detail {

// DFS over generator chains g_2 < g_3 < ... with each g_i the smallest
// element outside the previous span; every subspace in range is reached
// from exactly one chain, so the stream needs no dedup memory.
template <typename Fn>
inline void enumerate_span_dfs(const FieldTable& F, std::vector<uint32_t>& span_sorted,
                               uint32_t level, uint32_t k, uint32_t g_lo, uint32_t g_hi,
                               Fn&& emit) {
    const uint32_t q = F.q();
    const uint32_t stride = F.scalar_stride();
    const uint32_t M = F.modulus();
    std::vector<uint32_t> fresh;
    fresh.reserve((span_sorted.size() + 1) * (q - 1));
    for (uint32_t g = g_lo; g < g_hi; ++g) {
        if (std::binary_search(span_sorted.begin(), span_sorted.end(), g)) continue;
        // new elements are a*g + s for scalars a and s in span+{0}; g must be
        // their minimum or this chain is not the canonical one
        fresh.clear();
        bool canonical = true;
        for (uint32_t a = 0; canonical && a < q - 1; ++a) {
            uint32_t ge = g + a * stride;
            if (ge >= M) ge -= M;
            if (ge < g) { canonical = false; break; }
            fresh.push_back(ge);
            for (uint32_t s : span_sorted) {
                uint32_t e = F.add_exp(ge, s);
                if (e == kNoExponent || e < g) { canonical = false; break; }
                fresh.push_back(e);
            }
        }
        if (!canonical) continue;
        std::sort(fresh.begin(), fresh.end());
        std::vector<uint32_t> next;
        next.resize(span_sorted.size() + fresh.size());
        std::merge(span_sorted.begin(), span_sorted.end(), fresh.begin(), fresh.end(),
                   next.begin());
        if (level == k) {
            Subspace X;
            X.k = k;
            X.exps = std::move(next);
            emit(X);
        } else {
            enumerate_span_dfs(F, next, level + 1, k, g + 1, M, emit);
        }
    }
}

} // namespace detail

// Streams every k-subspace containing v exactly once.  Restricting the
// first free generator to [g2_lo, g2_hi) partitions the stream.
template <typename Fn>
inline void enumerate_through_range(const FieldTable& F, FElem v, uint32_t k, uint32_t g2_lo,
                                    uint32_t g2_hi, Fn&& emit) {
    if (v.is_zero()) throw Error(Errc::bad_format, "enumerate_through needs a nonzero vector");
    Subspace base = span_of(F, {v});
    if (k < 1) throw Error(Errc::bad_format, "k must be positive");
    if (k == 1) {
        if (g2_lo == 0) emit(base);
        return;
    }
    detail::enumerate_span_dfs(F, base.exps, 2, k, g2_lo, g2_hi, emit);
}

template <typename Fn>
inline void enumerate_through(const FieldTable& F, FElem v, uint32_t k, Fn&& emit) {
    enumerate_through_range(F, v, k, 0, F.modulus(), emit);
}

// Streams every k-subspace of the whole space exactly once.
template <typename Fn>
inline void enumerate_all_subspaces(const FieldTable& F, uint32_t k, Fn&& emit) {
    if (k < 1) throw Error(Errc::bad_format, "k must be positive");
    const uint32_t M = F.modulus();
    const uint32_t stride = F.scalar_stride();
    for (uint32_t g = 0; g < M; ++g) {
        // g must be minimal in its scalar class
        bool minimal = true;
        for (uint32_t a = 1; a < F.q() - 1; ++a) {
            uint32_t ge = g + a * stride;
            if (ge >= M) ge -= M;
            if (ge < g) { minimal = false; break; }
        }
        if (!minimal) continue;
        Subspace line = span_of(F, {FElem::at(g)});
        if (line.exps.front() != g) continue;
        if (k == 1) {
            emit(line);
        } else {
            detail::enumerate_span_dfs(F, line.exps, 2, k, g + 1, M, emit);
        }
    }
}

inline std::string format_subspace(const Subspace& X) {
    std::string out = "{";
    for (size_t i = 0; i < X.exps.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(X.exps[i]);
    }
    out += '}';
    return out;
}

inline Subspace parse_subspace(const FieldTable& F, const std::string& text) {
    size_t b = text.find('{');
    size_t e = text.find('}');
    if (b == std::string::npos || e == std::string::npos || e < b)
        throw Error(Errc::bad_format, "subspace must be brace-enclosed: " + text);
    std::string body = text.substr(b + 1, e - b - 1);
    Subspace X;
    size_t pos = 0;
    while (pos < body.size()) {
        size_t comma = body.find(',', pos);
        if (comma == std::string::npos) comma = body.size();
        std::string tok = body.substr(pos, comma - pos);
        size_t tb = tok.find_first_not_of(" \t");
        size_t te = tok.find_last_not_of(" \t");
        if (tb == std::string::npos) throw Error(Errc::bad_format, "empty exponent in " + text);
        tok = tok.substr(tb, te - tb + 1);
        try {
            X.exps.push_back(uint32_t(std::stoul(tok)));
        } catch (...) {
            throw Error(Errc::bad_format, "bad exponent '" + tok + "'");
        }
        pos = comma + 1;
    }
    std::sort(X.exps.begin(), X.exps.end());
    if (std::adjacent_find(X.exps.begin(), X.exps.end()) != X.exps.end())
        throw Error(Errc::bad_format, "duplicate exponent in " + text);
    for (uint32_t v : X.exps)
        if (v >= F.modulus()) throw Error(Errc::bad_format, "exponent out of range in " + text);
    X.k = detail::dim_from_size(X.exps.size(), F.q());
    uint64_t expect = 1;
    for (uint32_t i = 0; i < X.k; ++i) expect *= F.q();
    if (expect - 1 != X.exps.size())
        throw Error(Errc::bad_format, "element count is not q^k - 1 in " + text);
    return X;
}

} // namespace qsf
