#pragma once

// Exact cover over the lambda=1 Kramer-Mesner system, solved with dancing
// links.  A column is admissible iff it covers every row at most once, where
// the coverage of row i by column j is entry(i,j) * len(col j) / len(row i);
// the raw entry counts subspaces of the fixed column representative, and the
// two differ on short orbits.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qsf/error.hpp"
#include "qsf/km.hpp"
#include "qsf/subspace.hpp"

namespace qsf {

struct CoverOption {
    uint32_t col_id = 0;
    std::vector<uint32_t> rows; // sorted, each covered exactly once
};

struct CoverInstance {
    uint32_t items = 0;                // row ids 0..items-1, covered exactly once each
    std::vector<CoverOption> options;  // admissible columns
    std::vector<uint32_t> excluded;    // columns dropped because they double-cover a row
};

struct SolutionSet {
    std::vector<uint32_t> selected; // sorted column ids
    std::vector<Subspace> reps;     // filled when an orbit table is attached

    friend bool operator<(const SolutionSet& a, const SolutionSet& b) {
        return a.selected < b.selected;
    }
};

inline CoverInstance to_cover(const KMMatrix& M) {
    CoverInstance inst;
    inst.items = M.rows;
    for (uint32_t j = 0; j < M.cols; ++j) {
        CoverOption opt;
        opt.col_id = j;
        bool admissible = true;
        for (size_t idx = M.col_begin[j]; idx < M.col_begin[j + 1]; ++idx) {
            const KMTriplet& e = M.entries[idx];
            uint64_t num = uint64_t(e.value) * M.col_lengths[j];
            if (num % M.row_lengths[e.row] != 0)
                throw std::logic_error("coverage count is not integral");
            uint64_t coverage = num / M.row_lengths[e.row];
            if (coverage >= 2) {
                admissible = false;
                break;
            }
            if (coverage == 1) opt.rows.push_back(e.row);
        }
        if (admissible)
            inst.options.push_back(std::move(opt));
        else
            inst.excluded.push_back(j);
    }
    return inst;
}

struct SolveOptions {
    uint64_t max_solutions = std::numeric_limits<uint64_t>::max();
    uint64_t max_nodes = std::numeric_limits<uint64_t>::max();
    double max_seconds = 0; // 0 = unlimited
    std::optional<uint64_t> order_seed;
};

struct SearchStats {
    uint64_t nodes = 0;
    uint64_t solutions = 0;
    bool exhaustive = false;
    bool budget_exceeded = false;
    double seconds = 0;
};

namespace detail {

// Dancing links over index arrays; headers for item r live at index r+1,
// index 0 is the root of the active-item list.
class Dlx {
public:
    Dlx(const CoverInstance& inst, const std::vector<uint32_t>& order) {
        const uint32_t N = inst.items;
        llink_.resize(N + 1);
        rlink_.resize(N + 1);
        len_.assign(N + 1, 0);
        for (uint32_t i = 0; i <= N; ++i) {
            llink_[i] = (i == 0) ? N : i - 1;
            rlink_[i] = (i == N) ? 0 : i + 1;
        }
        size_t count = N + 2; // headers + first spacer
        for (uint32_t oi : order) count += inst.options[oi].rows.size() + 1;
        top_.assign(count, 0);
        ulink_.resize(count);
        dlink_.resize(count);
        option_col_.assign(count, std::numeric_limits<uint32_t>::max());
        for (uint32_t i = 0; i <= N; ++i) {
            ulink_[i] = i;
            dlink_[i] = i;
        }
        size_t spacer = N + 1;
        int32_t sid = 0;
        top_[spacer] = sid;
        for (uint32_t oi : order) {
            const CoverOption& opt = inst.options[oi];
            size_t first = spacer + 1;
            for (size_t r = 0; r < opt.rows.size(); ++r) {
                size_t self = first + r;
                uint32_t item = opt.rows[r] + 1;
                top_[self] = int32_t(item);
                size_t up = ulink_[item];
                ulink_[self] = up;
                dlink_[self] = item;
                dlink_[up] = self;
                ulink_[item] = self;
                ++len_[item];
                option_col_[self] = opt.col_id;
            }
            size_t next_spacer = first + opt.rows.size();
            ulink_[next_spacer] = first;       // first node of the preceding option
            dlink_[spacer] = next_spacer - 1;  // last node of the following option
            top_[next_spacer] = --sid;
            spacer = next_spacer;
        }
    }

    void search(SearchStats& stats, const SolveOptions& opts,
                const std::function<bool(const std::vector<uint32_t>&)>& emit) {
        start_ = std::chrono::steady_clock::now();
        stats_ = &stats;
        opts_ = &opts;
        emit_ = &emit;
        stopped_ = false;
        choice_.clear();
        recurse();
        stats.exhaustive = !stopped_ && !stats.budget_exceeded;
    }

private:
    bool over_budget() {
        if (stats_->nodes > opts_->max_nodes) return true;
        if (opts_->max_seconds > 0 && (stats_->nodes & 0xFFF) == 0) {
            double el =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            if (el > opts_->max_seconds) return true;
        }
        return false;
    }

    void cover(uint32_t i) {
        rlink_[llink_[i]] = rlink_[i];
        llink_[rlink_[i]] = llink_[i];
        for (size_t p = dlink_[i]; p != i; p = dlink_[p]) hide(p);
    }

    void uncover(uint32_t i) {
        for (size_t p = ulink_[i]; p != i; p = ulink_[p]) unhide(p);
        rlink_[llink_[i]] = i;
        llink_[rlink_[i]] = i;
    }

    void hide(size_t p) {
        size_t q = p + 1;
        while (q != p) {
            int32_t x = top_[q];
            if (x <= 0) {
                q = ulink_[q]; // spacer: wrap to the option's first node
            } else {
                ulink_[dlink_[q]] = ulink_[q];
                dlink_[ulink_[q]] = dlink_[q];
                --len_[size_t(x)];
                ++q;
            }
        }
    }

    void unhide(size_t p) {
        size_t q = p - 1;
        while (q != p) {
            int32_t x = top_[q];
            if (x <= 0) {
                q = dlink_[q]; // spacer: wrap to the option's last node
            } else {
                ulink_[dlink_[q]] = q;
                dlink_[ulink_[q]] = q;
                ++len_[size_t(x)];
                --q;
            }
        }
    }

    void recurse() {
        if (rlink_[0] == 0) {
            std::vector<uint32_t> sol;
            sol.reserve(choice_.size());
            for (size_t p : choice_) sol.push_back(option_col_[p]);
            std::sort(sol.begin(), sol.end());
            if (!(*emit_)(sol)) stopped_ = true;
            return;
        }
        uint32_t best = 0;
        uint32_t best_len = std::numeric_limits<uint32_t>::max();
        for (uint32_t i = rlink_[0]; i != 0; i = rlink_[i]) {
            if (len_[i] < best_len) {
                best_len = len_[i];
                best = i;
            }
        }
        if (best_len == 0) return;
        cover(best);
        for (size_t p = dlink_[best]; p != best; p = dlink_[p]) {
            ++stats_->nodes;
            if (over_budget()) {
                stats_->budget_exceeded = true;
                stopped_ = true;
                break;
            }
            for (size_t q = p + 1; q != p;) {
                int32_t x = top_[q];
                if (x <= 0) {
                    q = ulink_[q];
                } else {
                    cover(uint32_t(x));
                    ++q;
                }
            }
            choice_.push_back(p);
            recurse();
            choice_.pop_back();
            for (size_t q = p - 1; q != p;) {
                int32_t x = top_[q];
                if (x <= 0) {
                    q = dlink_[q];
                } else {
                    uncover(uint32_t(x));
                    --q;
                }
            }
            if (stopped_) break;
        }
        uncover(best);
    }

    std::vector<uint32_t> llink_, rlink_, len_;
    std::vector<int32_t> top_;
    std::vector<size_t> ulink_, dlink_;
    std::vector<uint32_t> option_col_;
    std::vector<size_t> choice_;
    SearchStats* stats_ = nullptr;
    const SolveOptions* opts_ = nullptr;
    const std::function<bool(const std::vector<uint32_t>&)>* emit_ = nullptr;
    std::chrono::steady_clock::time_point start_;
    bool stopped_ = false;
};

} // namespace detail

// Streams exact covers, deduplicated as column-id sets, until the limit,
// budget, or exhaustion.  An empty instance has exactly one cover, the
// empty selection.
inline SearchStats solve(const CoverInstance& inst, const SolveOptions& opts,
                         const std::function<bool(const SolutionSet&)>& on_solution) {
    SearchStats stats;
    auto t0 = std::chrono::steady_clock::now();

    std::vector<uint32_t> order(uint32_t(inst.options.size()));
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    if (opts.order_seed) {
        std::mt19937_64 rng(*opts.order_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    std::set<std::vector<uint32_t>> seen;
    detail::Dlx dlx(inst, order);
    dlx.search(stats, opts, [&](const std::vector<uint32_t>& sol) {
        if (!seen.insert(sol).second) return true;
        stats.solutions = seen.size();
        SolutionSet s;
        s.selected = sol;
        if (!on_solution(s)) return false;
        return stats.solutions < opts.max_solutions;
    });
    stats.solutions = seen.size();
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

// Independent verifier: accepts iff every item is covered exactly once.
inline bool check_cover(const CoverInstance& inst, const SolutionSet& sol) {
    std::vector<uint32_t> count(inst.items, 0);
    for (uint32_t col : sol.selected) {
        const CoverOption* opt = nullptr;
        for (const CoverOption& o : inst.options)
            if (o.col_id == col) {
                opt = &o;
                break;
            }
        if (!opt) return false; // selected an excluded or unknown column
        for (uint32_t r : opt->rows) {
            if (r >= inst.items) return false;
            ++count[r];
        }
    }
    for (uint32_t c : count)
        if (c != 1) return false;
    return true;
}

// instance file: `items=<N>` then one option per line, `col_id: r1,r2,...`
inline void write_instance(std::ostream& os, const CoverInstance& inst) {
    os << "items=" << inst.items << '\n';
    for (const CoverOption& o : inst.options) {
        os << o.col_id << ':';
        for (size_t i = 0; i < o.rows.size(); ++i) os << (i ? "," : " ") << o.rows[i];
        os << '\n';
    }
}

inline CoverInstance read_instance(std::istream& is) {
    CoverInstance inst;
    std::string line;
    if (!std::getline(is, line) || line.rfind("items=", 0) != 0)
        throw Error(Errc::bad_format, "instance must start with items=<N>");
    inst.items = uint32_t(std::stoul(line.substr(6)));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        size_t colon = line.find(':');
        if (colon == std::string::npos) throw Error(Errc::bad_format, "option line missing ':'");
        CoverOption o;
        o.col_id = uint32_t(std::stoul(line.substr(0, colon)));
        size_t pos = colon + 1;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == ',')) ++pos;
            if (pos >= line.size()) break;
            size_t end = line.find_first_of(", ", pos);
            if (end == std::string::npos) end = line.size();
            uint32_t r = uint32_t(std::stoul(line.substr(pos, end - pos)));
            if (r >= inst.items) throw Error(Errc::bad_format, "row id out of range");
            o.rows.push_back(r);
            pos = end;
        }
        std::sort(o.rows.begin(), o.rows.end());
        inst.options.push_back(std::move(o));
    }
    return inst;
}

} // namespace qsf
