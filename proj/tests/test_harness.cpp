#include "fracspec/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fracspec;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / "fracspec_harness" / leaf;
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_json(const std::string& leaf, const nlohmann::json& j) {
    const fs::path p = temp_dir("configs") / leaf;
    std::ofstream(p) << j.dump(2);
    return p;
}

int run_cli(const std::string& args) {
#ifdef FRACSPEC_BIN
    const std::string cmd = std::string(FRACSPEC_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
#else
    (void)args;
    return -1;
#endif
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults and inf tokens") {
        const nlohmann::json j = {{"grid_points", 128}, {"besov_p", "inf"}, {"besov_q", "inf"}};
        const ExperimentConfig c = parse_config(j, "besov-norm");
        CHECK(c.grid_points == 128);
        CHECK(std::isinf(c.besov_p));
        CHECK(std::isinf(c.besov_q));
        CHECK(c.grid_dim == 1);
        CHECK(c.uniformity_factor == 4.0);
    }
    SUBCASE("unknown keys are field-level errors") {
        const nlohmann::json j = {{"grid_pints", 128}};
        CHECK_THROWS_WITH_AS(parse_config(j, "besov-norm"), "config: unknown key 'grid_pints'",
                             std::invalid_argument);
    }
    SUBCASE("type errors name the key") {
        const nlohmann::json j = {{"grid_points", "many"}};
        CHECK_THROWS_AS(parse_config(j, "besov-norm"), std::invalid_argument);
    }
    SUBCASE("missing referenced files are rejected") {
        const nlohmann::json j = {{"kernel_file", "/nonexistent/k.kern"}};
        CHECK_THROWS_AS(parse_config(j, "analyze-symbol"), std::invalid_argument);
    }
    SUBCASE("round trip through the normalized echo") {
        const nlohmann::json j = {{"grid_points", 64}, {"phi2", 1.25}, {"probe_kind", "mode"}};
        const ExperimentConfig c = parse_config(j, "verify-coercivity");
        const nlohmann::json echo = config_to_json(c);
        const ExperimentConfig c2 = parse_config(echo, "verify-coercivity");
        CHECK(config_to_json(c2) == echo);
    }
}

TEST_CASE("run_experiment writes reports and is deterministic") {
    nlohmann::json j = {{"grid_points", 64},
                        {"kernel_builtin", "neg_laplace"},
                        {"probe_kind", "mode"},
                        {"probe_mode", {1}}};
    j["out_dir"] = temp_dir("runA").string();
    ExperimentConfig c = parse_config(j, "verify-coercivity");
    const ExperimentConfig config_a = c;
    const RunResult a = run_experiment(c);
    CHECK(a.manifest.pass());
    CHECK(fs::exists(a.out_dir / "report.csv"));
    CHECK(fs::exists(a.out_dir / "report.json"));
    CHECK(fs::exists(a.out_dir / "manifest.json"));

    c.out_dir = temp_dir("runB").string();
    const RunResult b = run_experiment(c);
    CHECK(slurp(a.out_dir / "report.csv") == slurp(b.out_dir / "report.csv"));
    CHECK(slurp(a.out_dir / "report.json") == slurp(b.out_dir / "report.json"));

    // parallel sweep produces the identical report
    c.out_dir = temp_dir("runC").string();
    c.threads = 4;
    const RunResult par = run_experiment(c);
    CHECK(slurp(a.out_dir / "report.csv") == slurp(par.out_dir / "report.csv"));

    // the manifest echoes a config that re-parses to the same normal form
    const nlohmann::json manifest = nlohmann::json::parse(slurp(a.out_dir / "manifest.json"));
    const ExperimentConfig echoed = parse_config(manifest.at("config"), "verify-coercivity");
    CHECK(config_to_json(echoed) == config_to_json(config_a));
    CHECK(manifest.at("tool_version").get<std::string>() == kToolVersion);
}

TEST_CASE("analyze-symbol flags the sign-flipped kernel") {
    nlohmann::json j = {{"grid_radius", 16.0 * kPi}, {"grid_points", 128},
                        {"kernel_builtin", "bad_sign"}};
    j["out_dir"] = temp_dir("bad_sign").string();
    const RunResult r = run_experiment(parse_config(j, "analyze-symbol"));
    CHECK_FALSE(r.manifest.pass());
    bool sector_fail = false;
    for (const Criterion& c : r.manifest.criteria)
        if (c.name == "ellipticity" && !c.pass) sector_fail = true;
    CHECK(sector_fail);
}

TEST_CASE("solve commands write readable grids") {
    SUBCASE("elliptic solution file") {
        nlohmann::json j = {{"grid_points", 64}, {"probe_kind", "mode"}, {"probe_mode", {1}},
                            {"lambda_re", 1.0}, {"lambda_im", 0.0}};
        j["out_dir"] = temp_dir("ell").string();
        const ExperimentConfig c = parse_config(j, "solve-elliptic");
        const RunResult r = run_experiment(c);
        CHECK(r.manifest.pass());
        const GridFunction u = read_grid_csv(c.grid(), (r.out_dir / "solution.csv").string());
        // u = cos(x)/2
        const GridFunction expect = sample_closure(c.grid(), [](std::span<const double> x) {
            return cplx{0.5 * std::cos(x[0]), 0.0};
        });
        CHECK(rel_l2_distance(u, expect) <= 1e-12);
    }
    SUBCASE("parabolic slices round trip as forcing input") {
        nlohmann::json j = {{"grid_points", 32}, {"probe_kind", "mode"}, {"probe_mode", {1}},
                            {"horizon", 1.0}, {"steps", 16}};
        j["out_dir"] = temp_dir("par").string();
        const ExperimentConfig c = parse_config(j, "solve-parabolic");
        const RunResult r = run_experiment(c);
        CHECK(r.manifest.pass());
        CHECK(fs::exists(r.out_dir / "slice_0000.csv"));
        CHECK(fs::exists(r.out_dir / "slice_0016.csv"));

        // feed the written slices back as a forcing directory
        nlohmann::json j2 = j;
        j2["forcing_dir"] = r.out_dir.string();
        j2["out_dir"] = temp_dir("par2").string();
        const RunResult r2 = run_experiment(parse_config(j2, "solve-parabolic"));
        CHECK(r2.manifest.pass());
    }
}

#ifdef FRACSPEC_BIN
TEST_CASE("CLI exit codes") {
    SUBCASE("verify-coercivity run passes with exit 0") {
        nlohmann::json j = {{"grid_points", 64}, {"probe_kind", "mode"}, {"probe_mode", {1}}};
        j["out_dir"] = temp_dir("cli_ok").string();
        const fs::path cfg = write_json("ok.json", j);
        CHECK(run_cli("verify-coercivity --config " + cfg.string()) == 0);
    }
    SUBCASE("failing criterion exits 1 under --strict") {
        nlohmann::json j = {{"grid_radius", 16.0 * kPi}, {"grid_points", 128},
                            {"kernel_builtin", "bad_sign"}};
        j["out_dir"] = temp_dir("cli_fail").string();
        const fs::path cfg = write_json("fail.json", j);
        CHECK(run_cli("analyze-symbol --strict --config " + cfg.string()) == 1);
        CHECK(run_cli("analyze-symbol --config " + cfg.string()) == 0);
    }
    SUBCASE("missing kernel file exits 2") {
        nlohmann::json j = {{"kernel_file", "/nonexistent/k.kern"}};
        const fs::path cfg = write_json("missing.json", j);
        CHECK(run_cli("analyze-symbol --config " + cfg.string()) == 2);
    }
    SUBCASE("usage errors exit 2") {
        CHECK(run_cli("analyze-symbol") == 2);
        CHECK(run_cli("no-such-command --config x.json") == 2);
    }
}
#endif
