// qsf: build and verify q-analogs of Steiner systems.
//
// Subcommands: field check, orbits build, km build, solve, verify, dfamily,
// pipeline.  See README.md for the file formats and exit codes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qsf/qsf.hpp"

namespace {

using namespace qsf;

struct CommonFieldArgs {
    uint32_t q = 2;
    uint32_t n = 13;
    std::string poly;
};

void add_field_flags(CLI::App* cmd, CommonFieldArgs& args) {
    cmd->add_option("--q", args.q, "prime field characteristic");
    cmd->add_option("--n", args.n, "extension degree");
    cmd->add_option("--poly", args.poly,
                    "polynomial: exponent list (e.g. 13,12,10,9,0) or coefficient list");
}

FieldTable make_field(const CommonFieldArgs& args) {
    PipelineParams P;
    P.q = args.q;
    P.n = args.n;
    P.poly = args.poly;
    return build_field(resolve_polynomial(P), table_cap_from_env());
}

int cmd_field_check(const CommonFieldArgs& args) {
    PipelineParams P;
    P.q = args.q;
    P.n = args.n;
    P.poly = args.poly;
    PrimePolynomial poly = resolve_polynomial(P);
    uint64_t card = 1;
    for (uint32_t i = 0; i < poly.n; ++i) card *= poly.q;
    std::cout << "q=" << poly.q << " n=" << poly.n << " M=" << card - 1
              << " poly=" << polynomial_to_string(poly) << '\n';
    detail::Poly f(poly.coeffs.begin(), poly.coeffs.end());
    if (!detail::is_irreducible(f, poly.q, poly.n)) {
        std::cout << "irreducible=no primitive=no\n";
        return exit_reject;
    }
    uint64_t ord = root_order(poly);
    std::cout << "irreducible=yes order=" << ord
              << " primitive=" << (ord == card - 1 ? "yes" : "no") << '\n';
    return ord == card - 1 ? exit_ok : exit_reject;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-Steiner system construction and verification toolkit"};
    app.require_subcommand(1);

    // field check
    CommonFieldArgs field_args;
    CLI::App* field = app.add_subcommand("field", "finite field utilities");
    CLI::App* field_check = field->add_subcommand("check", "report order and primitivity");
    add_field_flags(field_check, field_args);

    // orbits build
    CommonFieldArgs orbit_field;
    uint32_t orbit_k = 3;
    std::string orbit_group = "normalizer";
    std::string orbit_out;
    unsigned orbit_workers = 1;
    CLI::App* orbits = app.add_subcommand("orbits", "orbit table utilities");
    CLI::App* orbits_build = orbits->add_subcommand("build", "build and serialize an orbit table");
    add_field_flags(orbits_build, orbit_field);
    orbits_build->add_option("--k", orbit_k, "subspace dimension");
    orbits_build->add_option("--group", orbit_group, "singer|galois|normalizer|identity");
    orbits_build->add_option("--out", orbit_out, "output file (default: stdout)");
    orbits_build->add_option("--workers", orbit_workers, "worker threads");

    // km build
    CommonFieldArgs km_field;
    uint32_t km_t = 2, km_k = 3;
    std::string km_group = "normalizer";
    std::string km_out = "km.txt";
    std::string km_instance_out;
    unsigned km_workers = 1;
    CLI::App* km = app.add_subcommand("km", "Kramer-Mesner matrix utilities");
    CLI::App* km_build_cmd = km->add_subcommand("build", "build the orbit incidence matrix");
    add_field_flags(km_build_cmd, km_field);
    km_build_cmd->add_option("--t", km_t, "row subspace dimension");
    km_build_cmd->add_option("--k", km_k, "column subspace dimension");
    km_build_cmd->add_option("--group", km_group, "singer|galois|normalizer|identity");
    km_build_cmd->add_option("--out", km_out, "matrix output file");
    km_build_cmd->add_option("--instance-out", km_instance_out,
                             "also write the lambda=1 exact-cover instance");
    km_build_cmd->add_option("--workers", km_workers, "worker threads");

    // solve
    std::string solve_instance;
    uint64_t solve_limit = 1;
    double solve_max_nodes = 0;
    double solve_max_seconds = 0;
    std::optional<uint64_t> solve_seed;
    std::string solve_out;
    CLI::App* solve_cmd = app.add_subcommand("solve", "exact cover over an instance file");
    solve_cmd->add_option("--instance", solve_instance, "instance file")->required();
    solve_cmd->add_option("--limit", solve_limit, "stop after this many solutions (0 = all)");
    solve_cmd->add_option("--max-nodes", solve_max_nodes, "node budget (accepts 1e9 style)");
    solve_cmd->add_option("--max-seconds", solve_max_seconds, "wall clock budget");
    solve_cmd->add_option("--seed", solve_seed, "permutes option insertion order");
    solve_cmd->add_option("--out", solve_out, "solution file (default: stdout)");

    // verify
    std::string verify_design;
    CLI::App* verify_cmd = app.add_subcommand("verify", "verify the Steiner property of a design file");
    verify_cmd->add_option("--design", verify_design, "design file")->required();

    // dfamily
    std::string df_design;
    std::string df_out = "df.txt";
    bool df_general_q = false;
    CLI::App* df_cmd = app.add_subcommand("dfamily", "extract and verify a difference family");
    df_cmd->add_option("--design", df_design, "design file")->required();
    df_cmd->add_option("--out", df_out, "difference family output file");
    df_cmd->add_flag("--allow-general-q", df_general_q,
                     "enable the experimental construction for odd q");

    // pipeline
    PipelineParams pp;
    std::string pp_group = "normalizer";
    std::string pp_mode = "verify";
    std::string pp_preset;
    double pp_max_nodes = 0;
    uint64_t pp_limit = 0;
    bool pp_list_presets = false;
    CLI::App* pipe = app.add_subcommand("pipeline", "run the full pipeline");
    pipe->add_option("--q", pp.q, "prime field characteristic");
    pipe->add_option("--n", pp.n, "extension degree");
    pipe->add_option("--t", pp.t, "covered subspace dimension");
    pipe->add_option("--k", pp.k, "block subspace dimension");
    pipe->add_option("--group", pp_group, "singer|galois|normalizer|identity");
    pipe->add_option("--poly", pp.poly, "field polynomial override");
    pipe->add_option("--mode", pp_mode, "verify|search|nonexist");
    pipe->add_option("--solution", pp.solution_path, "solution file for verify mode");
    pipe->add_option("--limit", pp_limit, "solution limit for search mode (0 = all)");
    pipe->add_option("--seed", pp.seed, "option order seed");
    pipe->add_option("--max-nodes", pp_max_nodes, "search node budget (accepts 1e9 style)");
    pipe->add_option("--max-seconds", pp.max_seconds, "search wall clock budget");
    pipe->add_option("--workers", pp.workers, "worker threads");
    pipe->add_option("--out-dir", pp.out_dir, "artifact directory");
    pipe->add_option("--preset", pp_preset, "named nonexistence case");
    pipe->add_flag("--list-presets", pp_list_presets, "list named presets and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (field_check->parsed()) return cmd_field_check(field_args);

        if (orbits_build->parsed()) {
            FieldTable F = make_field(orbit_field);
            OrbitTableOptions opts;
            opts.workers = orbit_workers;
            OrbitTable T = build_orbit_table(F, orbit_k, parse_group(orbit_group), opts);
            std::cerr << "orbits: " << T.num_orbits()
                      << " (invariant key collisions: " << T.invariant_collisions() << ")\n";
            if (orbit_out.empty()) {
                write_orbit_table(std::cout, T);
            } else {
                std::ofstream os(orbit_out, std::ios::binary);
                write_orbit_table(os, T);
            }
            return exit_ok;
        }

        if (km_build_cmd->parsed()) {
            FieldTable F = make_field(km_field);
            GroupKind kind = parse_group(km_group);
            OrbitTableOptions opts;
            opts.workers = km_workers;
            OrbitTable rows = build_orbit_table(F, km_t, kind, opts);
            OrbitTable cols = build_orbit_table(F, km_k, kind, opts);
            KMMatrix M = build_km(F, rows, cols, km_workers);
            std::ofstream os(km_out, std::ios::binary);
            write_km(os, M);
            std::cerr << "km: " << M.rows << " x " << M.cols << " -> " << km_out << '\n';
            if (!km_instance_out.empty()) {
                CoverInstance inst = to_cover(M);
                std::ofstream is(km_instance_out, std::ios::binary);
                write_instance(is, inst);
                std::cerr << "instance: " << inst.items << " items, " << inst.options.size()
                          << " options -> " << km_instance_out << '\n';
            }
            return exit_ok;
        }

        if (solve_cmd->parsed()) {
            std::ifstream in(solve_instance);
            if (!in) throw Error(Errc::bad_format, "cannot open " + solve_instance);
            CoverInstance inst = read_instance(in);
            SolveOptions opts;
            if (solve_limit > 0) opts.max_solutions = solve_limit;
            if (solve_max_nodes > 0) opts.max_nodes = uint64_t(solve_max_nodes);
            opts.max_seconds = solve_max_seconds;
            opts.order_seed = solve_seed;
            std::ofstream file_out;
            std::ostream* os = &std::cout;
            if (!solve_out.empty()) {
                file_out.open(solve_out, std::ios::binary);
                os = &file_out;
            }
            SearchStats stats = solve(inst, opts, [&](const SolutionSet& s) {
                for (size_t i = 0; i < s.selected.size(); ++i)
                    *os << (i ? " " : "") << s.selected[i];
                *os << '\n';
                return true;
            });
            std::cerr << "nodes=" << stats.nodes << " solutions=" << stats.solutions
                      << " exhaustive=" << (stats.exhaustive ? "yes" : "no")
                      << " budget_exceeded=" << (stats.budget_exceeded ? "yes" : "no") << '\n';
            if (stats.budget_exceeded) return exit_budget;
            return stats.solutions > 0 ? exit_ok : exit_reject;
        }

        if (verify_cmd->parsed()) {
            std::ifstream in(verify_design);
            if (!in) throw Error(Errc::bad_format, "cannot open " + verify_design);
            uint32_t q, t, k, n;
            size_t count;
            in >> q >> t >> k >> n >> count;
            in.seekg(0);
            PipelineParams P;
            P.q = q;
            P.n = n;
            FieldTable F = build_field(resolve_polynomial(P), table_cap_from_env());
            Design D = read_design(in, F);
            SteinerVerdict V = verify_steiner(F, D);
            std::cout << "blocks=" << D.num_blocks() << " t_subspaces=" << V.total_t_subspaces
                      << " verdict=" << (V.accepted ? "accept" : "reject") << "\nhistogram:";
            for (auto& [cnt, num] : V.histogram) std::cout << ' ' << cnt << ':' << num;
            std::cout << '\n';
            if (V.accepted) {
                CodeSizeReport R = report_code_size(D, V);
                std::cout << "code_size: A_" << q << "(" << R.n << "," << R.distance << ","
                          << R.dimension << ") = " << R.size << '\n';
            }
            return V.accepted ? exit_ok : exit_reject;
        }

        if (df_cmd->parsed()) {
            std::ifstream in(df_design);
            if (!in) throw Error(Errc::bad_format, "cannot open " + df_design);
            uint32_t q, t, k, n;
            size_t count;
            in >> q >> t >> k >> n >> count;
            in.seekg(0);
            PipelineParams P;
            P.q = q;
            P.n = n;
            FieldTable F = build_field(resolve_polynomial(P), table_cap_from_env());
            Design D = read_design(in, F);
            DifferenceFamily DF = extract_df(F, D, df_general_q);
            DFVerdict V = verify_df(DF);
            std::ofstream os(df_out, std::ios::binary);
            write_df(os, DF);
            std::cout << "blocks=" << DF.blocks.size() << " v=" << DF.v
                      << " lambda=" << DF.lambda
                      << " verdict=" << (V.accepted ? "accept" : "reject") << '\n';
            return V.accepted ? exit_ok : exit_reject;
        }

        if (pipe->parsed()) {
            if (pp_list_presets) {
                for (const Preset& p : kPresets)
                    std::cout << p.name << ": q=" << p.q << " t=" << p.t << " k=" << p.k
                              << " n=" << p.n << " group=" << group_name(p.group)
                              << (p.long_running ? " (long-running)" : "") << '\n';
                return exit_ok;
            }
            if (!pp_preset.empty()) {
                const Preset* p = find_preset(pp_preset);
                if (!p) throw Error(Errc::bad_format, "unknown preset " + pp_preset);
                pp.q = p->q;
                pp.t = p->t;
                pp.k = p->k;
                pp.n = p->n;
                pp.group = p->group;
                pp_mode = "nonexist";
                if (p->long_running)
                    std::cerr << "note: preset " << p->name << " is long-running\n";
            } else {
                pp.group = parse_group(pp_group);
            }
            if (pp_mode == "verify")
                pp.mode = PipelineMode::verify;
            else if (pp_mode == "search")
                pp.mode = PipelineMode::search;
            else if (pp_mode == "nonexist")
                pp.mode = PipelineMode::nonexist;
            else
                throw Error(Errc::bad_format, "unknown mode " + pp_mode);
            if (pp_max_nodes > 0) pp.max_nodes = uint64_t(pp_max_nodes);
            if (pp_limit > 0) pp.limit = pp_limit;
            return run_pipeline(pp);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return (e.code() == Errc::bad_format) ? exit_usage : exit_reject;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    std::cerr << "no subcommand executed\n";
    return exit_usage;
}
