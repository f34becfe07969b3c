#pragma once

// End-to-end orchestration: resolve parameters, run verify / search /
// nonexist pipelines, write artifacts and the reproducibility manifest.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsf/cover.hpp"
#include "qsf/designkit.hpp"
#include "qsf/error.hpp"
#include "qsf/ffield.hpp"
#include "qsf/km.hpp"
#include "qsf/manifest.hpp"
#include "qsf/orbits.hpp"
#include "qsf/subspace.hpp"

namespace qsf {

// process exit codes: 0 = positive outcome for the requested mode,
// 2 = definitive negative (reject / exhausted with no solutions where one
// was sought), 3 = budget exceeded (inconclusive), 1 = internal error,
// 4 = usage error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_reject = 2;
inline constexpr int exit_budget = 3;
inline constexpr int exit_usage = 4;

struct DefaultPoly {
    uint32_t q, n;
    const char* exps; // exponent list of the nonzero terms
};

// shipped defaults, mirrored in data/default_polys.cfg; a config file
// (QSF_POLY_CONFIG or data/default_polys.cfg) overrides these.  All entries
// are verified primitive at field-build time; q=2 entries are exponent
// lists, the rest coefficient lists (constant term first).
inline constexpr DefaultPoly kDefaultPolys[] = {
    {2, 2, "2,1,0"},      {2, 3, "3,1,0"},      {2, 4, "4,1,0"},
    {2, 5, "5,2,0"},      {2, 6, "6,1,0"},      {2, 7, "7,1,0"},
    {2, 8, "8,4,3,2,0"},  {2, 9, "9,4,0"},      {2, 10, "10,3,0"},
    {2, 11, "11,2,0"},    {2, 12, "12,6,4,1,0"},
    {2, 13, "13,12,10,9,0"}, // the flagship default
    {3, 2, "2,1,1"},      {3, 3, "1,2,0,1"},    {3, 4, "2,1,0,0,1"},
    {3, 5, "1,2,0,0,0,1"}, {3, 6, "2,1,0,0,0,0,1"}, {3, 7, "1,2,1,0,0,0,0,1"},
    {5, 2, "2,1,1"},      {5, 3, "2,3,0,1"},    {5, 4, "2,2,1,0,1"},
    {5, 5, "2,4,0,0,0,1"}, {5, 6, "2,1,0,0,0,0,1"}, {5, 7, "2,3,0,0,0,0,0,1"},
    {7, 2, "3,1,1"},      {7, 3, "2,3,0,1"},
};

inline std::optional<std::string> default_poly_text(uint32_t q, uint32_t n) {
    // config file first
    const char* env = std::getenv("QSF_POLY_CONFIG");
    std::vector<std::string> candidates;
    if (env) candidates.push_back(env);
    candidates.push_back("data/default_polys.cfg");
    for (const std::string& path : candidates) {
        std::ifstream in(path);
        if (!in) continue;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            uint32_t fq, fn;
            std::string poly;
            if (ss >> fq >> fn >> poly && fq == q && fn == n) return poly;
        }
    }
    for (const DefaultPoly& d : kDefaultPolys)
        if (d.q == q && d.n == n) return std::string(d.exps);
    return std::nullopt;
}

inline uint64_t table_cap_from_env() {
    const char* env = std::getenv("QSF_TABLE_CAP");
    if (!env) return kDefaultTableCap;
    try {
        return std::stoull(env);
    } catch (...) {
        throw Error(Errc::bad_format, "QSF_TABLE_CAP must be an integer");
    }
}

enum class PipelineMode { verify, search, nonexist };

inline const char* mode_name(PipelineMode m) {
    switch (m) {
        case PipelineMode::verify:   return "verify";
        case PipelineMode::search:   return "search";
        case PipelineMode::nonexist: return "nonexist";
    }
    return "?";
}

struct PipelineParams {
    uint32_t q = 2, n = 13, t = 2, k = 3;
    GroupKind group = GroupKind::normalizer;
    std::string poly;          // empty = resolve from config/defaults
    PipelineMode mode = PipelineMode::verify;
    std::string solution_path; // verify mode input
    std::string out_dir = "out";
    uint64_t limit = std::numeric_limits<uint64_t>::max();
    std::optional<uint64_t> seed;
    uint64_t max_nodes = std::numeric_limits<uint64_t>::max();
    double max_seconds = 0;
    unsigned workers = 1;
    uint64_t table_cap = 0; // 0 = env or default
};

struct Preset {
    const char* name;
    uint32_t q, t, k, n;
    GroupKind group;
    bool long_running;
};

// the seven nonexistence cases; the larger ones take hours and stay out of
// the default test suite
inline constexpr Preset kPresets[] = {
    {"s2-2-3-7-galois", 2, 2, 3, 7, GroupKind::galois, false},
    {"s2-3-4-8-singer", 2, 3, 4, 8, GroupKind::singer, false},
    {"s2-2-4-10-norm", 2, 2, 4, 10, GroupKind::normalizer, true},
    {"s2-2-4-13-norm", 2, 2, 4, 13, GroupKind::normalizer, true},
    {"s2-3-4-10-norm", 2, 3, 4, 10, GroupKind::normalizer, true},
    {"s3-2-3-7-singer", 3, 2, 3, 7, GroupKind::singer, false},
    {"s5-2-3-7-norm", 5, 2, 3, 7, GroupKind::normalizer, true},
};

inline const Preset* find_preset(const std::string& name) {
    for (const Preset& p : kPresets)
        if (name == p.name) return &p;
    return nullptr;
}

namespace detail {

inline void write_text_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::bad_format, "cannot write " + path);
    fn(out);
}

} // namespace detail

inline PrimePolynomial resolve_polynomial(const PipelineParams& P) {
    std::string text = P.poly;
    if (text.empty()) {
        auto d = default_poly_text(P.q, P.n);
        if (!d)
            throw Error(Errc::bad_format, "no default polynomial for q=" + std::to_string(P.q) +
                                              " n=" + std::to_string(P.n) + "; pass --poly");
        text = *d;
    }
    return parse_polynomial(P.q, P.n, text);
}

inline std::vector<Subspace> read_solution_reps(const FieldTable& F, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::bad_format, "cannot open solution file " + path);
    std::vector<Subspace> reps;
    std::string line;
    while (std::getline(in, line)) {
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        Subspace s = parse_subspace(F, line);
        if (!is_subspace(F, s.exps))
            throw Error(Errc::bad_format, "not a subspace: " + line);
        reps.push_back(std::move(s));
    }
    return reps;
}

inline int run_pipeline(const PipelineParams& P, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    fs::create_directories(P.out_dir);
    auto art = [&](const std::string& name) { return (fs::path(P.out_dir) / name).string(); };

    RunManifest man;
    man.mode = mode_name(P.mode);
    man.q = P.q;
    man.n = P.n;
    man.t = P.t;
    man.k = P.k;
    man.group = group_name(P.group);
    man.order_seed = P.seed;
    man.limit = P.limit;
    man.max_nodes = P.max_nodes;
    man.max_seconds = P.max_seconds;
    man.table_cap = P.table_cap ? P.table_cap : table_cap_from_env();

    PrimePolynomial poly = resolve_polynomial(P);
    man.poly = polynomial_to_string(poly);
    FieldTable F = build_field(poly, man.table_cap);
    log << "field: q=" << P.q << " n=" << P.n << " M=" << F.modulus()
        << " poly=" << man.poly << '\n';

    int rc = exit_ok;

    if (P.mode == PipelineMode::verify) {
        if (P.solution_path.empty())
            throw Error(Errc::bad_format, "verify mode needs --solution");
        std::vector<Subspace> reps = read_solution_reps(F, P.solution_path);
        for (const Subspace& r : reps)
            if (r.k != P.k)
                throw Error(Errc::bad_format, "solution block of dimension " + std::to_string(r.k) +
                                                  ", expected " + std::to_string(P.k));
        log << "solution: " << reps.size() << " orbit representatives\n";

        Design D = expand(F, reps, P.group, P.t);
        log << "expanded: " << D.num_blocks() << " blocks\n";
        detail::write_text_file(art("design.txt"), [&](std::ostream& os) { write_design(os, D); });
        man.artifacts["design.txt"] = fnv1a64_file(art("design.txt"));

        SteinerVerdict V = verify_steiner(F, D);
        log << "steiner: " << (V.accepted ? "accept" : "reject") << "; histogram";
        for (auto& [cnt, num] : V.histogram) log << ' ' << cnt << ':' << num;
        log << '\n';
        if (V.accepted) {
            CodeSizeReport R = report_code_size(D, V);
            log << "code size: A_" << P.q << "(" << R.n << "," << R.distance << ","
                << R.dimension << ") = " << R.size << '\n';
        } else {
            rc = exit_reject;
        }

        if (V.accepted) {
            if (detail::gcd32(P.k, P.n) == 1 &&
                (P.q == 2 || (P.group == GroupKind::singer || P.group == GroupKind::normalizer))) {
                try {
                    DifferenceFamily DF = extract_df_from_reps(F, reps, P.group, P.q != 2);
                    DFVerdict dv = verify_df(DF);
                    log << "difference family: " << DF.blocks.size() << " blocks over Z_" << DF.v
                        << ", " << (dv.accepted ? "accept" : "reject") << '\n';
                    detail::write_text_file(art("df.txt"),
                                            [&](std::ostream& os) { write_df(os, DF); });
                    man.artifacts["df.txt"] = fnv1a64_file(art("df.txt"));
                    if (!dv.accepted) rc = exit_reject;
                } catch (const Error& e) {
                    log << "difference family skipped: " << e.what() << '\n';
                }
            } else {
                log << "difference family skipped: k and n not coprime or group lacks shifts\n";
            }
        }
    } else {
        OrbitTableOptions oopts;
        oopts.workers = P.workers;
        OrbitTable rows = build_orbit_table(F, P.t, P.group, oopts);
        log << "t-orbits: " << rows.num_orbits() << " (invariant key collisions: "
            << rows.invariant_collisions() << ")\n";
        OrbitTable cols = build_orbit_table(F, P.k, P.group, oopts);
        log << "k-orbits: " << cols.num_orbits() << " (invariant key collisions: "
            << cols.invariant_collisions() << ")\n";
        detail::write_text_file(art("orbits_t.txt"),
                                [&](std::ostream& os) { write_orbit_table(os, rows); });
        detail::write_text_file(art("orbits_k.txt"),
                                [&](std::ostream& os) { write_orbit_table(os, cols); });
        man.artifacts["orbits_t.txt"] = fnv1a64_file(art("orbits_t.txt"));
        man.artifacts["orbits_k.txt"] = fnv1a64_file(art("orbits_k.txt"));

        KMMatrix M = build_km(F, rows, cols, P.workers);
        detail::write_text_file(art("km.txt"), [&](std::ostream& os) { write_km(os, M); });
        man.artifacts["km.txt"] = fnv1a64_file(art("km.txt"));

        CoverInstance inst = to_cover(M);
        log << "cover instance: " << inst.items << " items, " << inst.options.size()
            << " options, " << inst.excluded.size() << " excluded columns\n";
        detail::write_text_file(art("instance.txt"),
                                [&](std::ostream& os) { write_instance(os, inst); });
        man.artifacts["instance.txt"] = fnv1a64_file(art("instance.txt"));

        SolveOptions sopts;
        sopts.max_solutions = (P.mode == PipelineMode::nonexist)
                                  ? std::numeric_limits<uint64_t>::max()
                                  : P.limit;
        sopts.max_nodes = P.max_nodes;
        sopts.max_seconds = P.max_seconds;
        sopts.order_seed = P.seed;

        std::vector<SolutionSet> found;
        SearchStats stats = solve(inst, sopts, [&](const SolutionSet& s) {
            if (!check_cover(inst, s))
                throw std::logic_error("solver emitted a selection that fails check_cover");
            found.push_back(s);
            log << "solution " << found.size() << ": " << s.selected.size() << " columns\n";
            return true;
        });
        log << "search: nodes=" << stats.nodes << " solutions=" << stats.solutions
            << (stats.exhaustive ? " exhaustive" : "")
            << (stats.budget_exceeded ? " budget-exceeded" : "") << '\n';

        detail::write_text_file(art("solutions.txt"), [&](std::ostream& os) {
            for (const SolutionSet& s : found) {
                for (size_t i = 0; i < s.selected.size(); ++i)
                    os << (i ? " " : "") << s.selected[i];
                os << '\n';
            }
        });
        detail::write_text_file(art("solutions.reps.txt"), [&](std::ostream& os) {
            for (const SolutionSet& s : found) {
                for (size_t i = 0; i < s.selected.size(); ++i)
                    os << (i ? " " : "") << format_subspace(cols.reps[s.selected[i]]);
                os << '\n';
            }
        });
        man.artifacts["solutions.txt"] = fnv1a64_file(art("solutions.txt"));
        man.artifacts["solutions.reps.txt"] = fnv1a64_file(art("solutions.reps.txt"));

        if (P.mode == PipelineMode::nonexist) {
            if (stats.budget_exceeded) {
                log << "nonexistence: budget exceeded, inconclusive\n";
                rc = exit_budget;
            } else if (stats.solutions == 0 && stats.exhaustive) {
                log << "nonexistence: no solutions (exhaustive)\n";
                rc = exit_ok;
            } else {
                log << "nonexistence refuted: solutions exist\n";
                rc = exit_reject;
            }
        } else {
            if (stats.solutions > 0)
                rc = exit_ok;
            else if (stats.budget_exceeded)
                rc = exit_budget;
            else
                rc = exit_reject;
        }
    }

    detail::write_text_file(art("manifest.json"),
                            [&](std::ostream& os) { os << man.to_json().dump(2) << '\n'; });
    log << "manifest: " << art("manifest.json") << '\n';
    return rc;
}

} // namespace qsf
