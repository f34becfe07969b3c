#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsf/pipeline.hpp"

using namespace qsf;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("qsf_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("default polynomial resolution prefers the shipped config") {
    auto d = default_poly_text(2, 13);
    REQUIRE(d.has_value());
    CHECK(*d == "13,12,10,9,0");
    CHECK(default_poly_text(3, 7).has_value());
    CHECK(!default_poly_text(11, 11).has_value());
}

TEST_CASE("presets cover the seven nonexistence cases") {
    CHECK(find_preset("s2-2-3-7-galois") != nullptr);
    CHECK(find_preset("s5-2-3-7-norm") != nullptr);
    CHECK(find_preset("nope") == nullptr);
    int long_running = 0;
    for (const Preset& p : kPresets) long_running += p.long_running;
    CHECK(std::size(kPresets) == 7);
    CHECK(long_running == 4);
}

TEST_CASE("nonexist pipeline proves S_2[2,3,7] has no shift-invariant system") {
    fs::path out = temp_dir("nonexist");
    PipelineParams P;
    P.q = 2;
    P.n = 7;
    P.t = 2;
    P.k = 3;
    P.group = GroupKind::singer;
    P.mode = PipelineMode::nonexist;
    P.out_dir = out.string();
    std::ostringstream log;
    int rc = run_pipeline(P, log);
    CHECK(rc == exit_ok);
    CHECK(log.str().find("no solutions (exhaustive)") != std::string::npos);
    for (const char* f : {"orbits_t.txt", "orbits_k.txt", "km.txt", "instance.txt",
                          "solutions.txt", "manifest.json"})
        CHECK(fs::exists(out / f));
}

TEST_CASE("pipeline reruns are byte-identical") {
    fs::path a = temp_dir("rerun_a");
    fs::path b = temp_dir("rerun_b");
    PipelineParams P;
    P.q = 2;
    P.n = 7;
    P.t = 2;
    P.k = 3;
    P.group = GroupKind::singer;
    P.mode = PipelineMode::nonexist;
    std::ostringstream log;
    P.out_dir = a.string();
    run_pipeline(P, log);
    P.out_dir = b.string();
    P.workers = 3; // worker count must not affect artifacts
    run_pipeline(P, log);
    for (const char* f : {"orbits_t.txt", "orbits_k.txt", "km.txt", "instance.txt",
                          "solutions.txt", "manifest.json"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("search mode distinguishes exhausted-empty from budget-exceeded") {
    PipelineParams P;
    P.q = 2;
    P.n = 7;
    P.t = 2;
    P.k = 3;
    P.group = GroupKind::singer;
    P.mode = PipelineMode::search;
    std::ostringstream log;
    P.out_dir = temp_dir("search_none").string();
    CHECK(run_pipeline(P, log) == exit_reject);

    P.max_nodes = 1;
    P.out_dir = temp_dir("search_budget").string();
    CHECK(run_pipeline(P, log) == exit_budget);
}

TEST_CASE("verify pipeline accepts a trivial t = k system") {
    FieldTable F = build_field(parse_polynomial(2, 5, "5,2,0"));
    OrbitTable T = build_orbit_table(F, 2, GroupKind::singer);
    fs::path out = temp_dir("verify");
    fs::path sol = out / "solution.txt";
    {
        std::ofstream os(sol);
        for (const Subspace& r : T.reps) os << format_subspace(r) << '\n';
    }
    PipelineParams P;
    P.q = 2;
    P.n = 5;
    P.t = 2;
    P.k = 2;
    P.group = GroupKind::singer;
    P.mode = PipelineMode::verify;
    P.solution_path = sol.string();
    P.out_dir = out.string();
    std::ostringstream log;
    int rc = run_pipeline(P, log);
    CHECK(rc == exit_ok);
    CHECK(log.str().find("steiner: accept") != std::string::npos);
    CHECK(fs::exists(out / "design.txt"));

    // drop a representative: the expansion misses blocks and verify rejects
    {
        std::ofstream os(sol);
        for (size_t i = 0; i + 1 < T.reps.size(); ++i) os << format_subspace(T.reps[i]) << '\n';
    }
    std::ostringstream log2;
    CHECK(run_pipeline(P, log2) == exit_reject);
    CHECK(log2.str().find("steiner: reject") != std::string::npos);
}

TEST_CASE("search finds the unique cover of a t = k instance") {
    // with t = k the matrix is the identity: the only exact cover selects
    // every column, and the expansion is the full set of k-subspaces
    PipelineParams P;
    P.q = 2;
    P.n = 4;
    P.t = 2;
    P.k = 2;
    P.group = GroupKind::singer;
    P.mode = PipelineMode::search;
    P.out_dir = temp_dir("search_tk").string();
    std::ostringstream log;
    CHECK(run_pipeline(P, log) == exit_ok);
    CHECK(log.str().find("solutions=1") != std::string::npos);
}

TEST_CASE("manifest records parameters and artifact hashes") {
    fs::path out = temp_dir("manifest");
    PipelineParams P;
    P.q = 2;
    P.n = 7;
    P.t = 2;
    P.k = 3;
    P.group = GroupKind::galois;
    P.mode = PipelineMode::nonexist;
    P.out_dir = out.string();
    std::ostringstream log;
    int rc = run_pipeline(P, log);
    CHECK(rc == exit_ok);
    nlohmann::json j = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(j["parameters"]["q"] == 2);
    CHECK(j["parameters"]["group"] == "galois");
    CHECK(j["parameters"]["poly"] == "1,1,0,0,0,0,0,1");
    CHECK(j["artifacts"].contains("km.txt"));
    std::string h = j["artifacts"]["km.txt"];
    CHECK(h == fnv1a64_file((out / "km.txt").string()));
}

TEST_CASE("table cap env var is honored") {
    setenv("QSF_TABLE_CAP", "64", 1);
    PipelineParams P;
    P.q = 2;
    P.n = 7;
    P.t = 2;
    P.k = 3;
    P.group = GroupKind::singer;
    P.mode = PipelineMode::nonexist;
    P.out_dir = temp_dir("cap").string();
    std::ostringstream log;
    try {
        run_pipeline(P, log);
        FAIL("expected UnsupportedSize");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unsupported_size);
    }
    unsetenv("QSF_TABLE_CAP");
}
