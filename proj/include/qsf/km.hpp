#pragma once

// Kramer-Mesner matrix between t-orbits (rows) and k-orbits (columns): the
// entry (i, j) counts the t-subspaces of the fixed representative of k-orbit
// j that lie in t-orbit i.  Every column sums to [k choose t]_q.

#include <atomic>
#include <cstdint>
#include <istream>
#include <ostream>
#include <thread>
#include <vector>

#include "qsf/error.hpp"
#include "qsf/orbits.hpp"
#include "qsf/subspace.hpp"

namespace qsf {

struct KMTriplet {
    uint32_t row = 0;
    uint32_t col = 0;
    uint32_t value = 0;
};

struct KMMatrix {
    uint32_t t = 0, k = 0;
    uint32_t rows = 0, cols = 0;
    GroupKind group = GroupKind::normalizer;
    std::vector<uint64_t> row_lengths;
    std::vector<uint64_t> col_lengths;
    std::vector<KMTriplet> entries; // sorted by (col, row)

    // per-column slices, entries sorted by row inside a column
    std::vector<size_t> col_begin; // size cols+1
};

inline KMMatrix build_km(const FieldTable& F, const OrbitTable& t_orbits,
                         const OrbitTable& k_orbits, unsigned workers = 1) {
    if (t_orbits.group != k_orbits.group || t_orbits.q != k_orbits.q || t_orbits.n != k_orbits.n)
        throw Error(Errc::orbit_mismatch, "orbit tables come from different groups or fields");
    if (t_orbits.q != F.q() || t_orbits.n != F.n())
        throw Error(Errc::orbit_mismatch, "orbit tables do not match the loaded field");

    KMMatrix M;
    M.t = t_orbits.k;
    M.k = k_orbits.k;
    M.group = t_orbits.group;
    M.rows = uint32_t(t_orbits.num_orbits());
    M.cols = uint32_t(k_orbits.num_orbits());
    M.row_lengths = t_orbits.lengths;
    M.col_lengths = k_orbits.lengths;

    std::vector<std::vector<KMTriplet>> per_col(M.cols);
    std::atomic<uint32_t> next{0};
    auto run = [&]() {
        std::vector<uint32_t> count(M.rows, 0);
        std::vector<uint32_t> touched;
        for (;;) {
            uint32_t j = next.fetch_add(1);
            if (j >= M.cols) return;
            touched.clear();
            for (const Subspace& ts : t_subspaces(F, k_orbits.reps[j], M.t)) {
                uint32_t row = t_orbits.orbit_id(F, ts);
                if (count[row]++ == 0) touched.push_back(row);
            }
            std::sort(touched.begin(), touched.end());
            auto& out = per_col[j];
            out.reserve(touched.size());
            for (uint32_t row : touched) {
                out.push_back({row, j, count[row]});
                count[row] = 0;
            }
        }
    };
    unsigned w = workers == 0 ? 1 : workers;
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < w; ++i) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();

    M.col_begin.assign(M.cols + 1, 0);
    size_t total = 0;
    for (uint32_t j = 0; j < M.cols; ++j) {
        M.col_begin[j] = total;
        total += per_col[j].size();
    }
    M.col_begin[M.cols] = total;
    M.entries.reserve(total);
    for (uint32_t j = 0; j < M.cols; ++j)
        M.entries.insert(M.entries.end(), per_col[j].begin(), per_col[j].end());
    return M;
}

// file format: header `t k rows cols`, then `row col value` sorted by (col,row)
inline void write_km(std::ostream& os, const KMMatrix& M) {
    os << M.t << ' ' << M.k << ' ' << M.rows << ' ' << M.cols << '\n';
    for (const KMTriplet& e : M.entries)
        os << e.row << ' ' << e.col << ' ' << e.value << '\n';
}

inline KMMatrix read_km(std::istream& is) {
    KMMatrix M;
    is >> M.t >> M.k >> M.rows >> M.cols;
    if (!is) throw Error(Errc::bad_format, "bad km header");
    KMTriplet e;
    while (is >> e.row >> e.col >> e.value) {
        if (e.row >= M.rows || e.col >= M.cols) throw Error(Errc::bad_format, "km entry out of range");
        M.entries.push_back(e);
    }
    M.col_begin.assign(M.cols + 1, 0);
    size_t idx = 0;
    for (uint32_t j = 0; j < M.cols; ++j) {
        M.col_begin[j] = idx;
        while (idx < M.entries.size() && M.entries[idx].col == j) ++idx;
    }
    M.col_begin[M.cols] = idx;
    if (idx != M.entries.size()) throw Error(Errc::bad_format, "km entries not sorted by column");
    return M;
}

} // namespace qsf
