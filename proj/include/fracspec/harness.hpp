#pragma once

#include "fracspec/besov.hpp"
#include "fracspec/elliptic.hpp"
#include "fracspec/parabolic.hpp"
#include "fracspec/probes.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

namespace fracspec {

inline constexpr const char* kToolVersion = "fracspec 0.1.0";

enum ExitCode : int { kExitOk = 0, kExitCriterionFail = 1, kExitUsage = 2 };

// ---------------------------------------------------------------------------
// Experiment configuration (flat JSON, documented in the README).
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string command;

    int grid_dim = 1;
    double grid_radius = kPi;
    int grid_points = 256;

    std::string kernel_builtin = "neg_laplace";
    std::vector<double> kernel_params;
    std::string kernel_file;

    double besov_s = 0.5;
    double besov_p = 2.0;
    double besov_q = 2.0;
    std::vector<int> besov_m; // empty = canonical (2 per axis)
    std::vector<int> besov_k; // empty = canonical (floor(s) per axis)
    double besov_h0 = 1.0;
    int besov_quad_points = 64;

    double time_s = 0.5;
    double time_p = 2.0;
    double time_q = 2.0;
    double time_h0 = 1.0;

    int sweep_decade_min = -2;
    int sweep_decade_max = 4;
    std::vector<double> sweep_arguments; // empty = {0, +-phi2/2, +-phi2}
    double phi2 = kPi / 2.0 - 0.1;

    std::string probe_kind = "random_bandlimited";
    std::vector<int> probe_mode{1};
    std::vector<double> probe_center{0.0};
    double probe_width = 1.0;
    std::uint64_t probe_seed = 42;
    int probe_cutoff = 8;
    int probe_count = 5;

    double lambda_re = 1.0;
    double lambda_im = 0.0;
    std::string rhs_file;

    double horizon = 1.0;
    int steps = 128;
    std::string forcing_dir;

    std::string variant = "convolved"; // or "plain"
    double uniformity_factor = 4.0;
    double resolvent_bound = 2.0;
    double residual_tol = 1e-10;
    double parabolic_residual_tol = 1e-3;
    double parabolic_bound = 50.0;

    std::vector<double> embed_alpha{1.0};
    double embed_l = 2.0;
    double embed_p1 = 0.0; // 0 = same as besov_p
    std::vector<double> mu_list{0.0, 0.4};
    std::vector<double> h_sweep; // empty = 2^-6 .. 2^0

    std::string norm_mode = "besov"; // or "lp"
    double norm_p = 2.0;
    double uniformity_radius = kPi / 16.0; // range-heavy lattice for the uniformity sweep

    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int threads = 1;
    bool strict = false;

    SpatialGrid grid() const { return make_grid(grid_dim, grid_radius, grid_points); }

    KernelSet kernel() const {
        if (!kernel_file.empty()) return parse_kernel_file(kernel_file, grid_dim);
        return builtin_kernel(kernel_builtin, kernel_params, grid_dim);
    }

    BesovParams besov() const {
        BesovParams bp = BesovParams::standard(grid_dim, besov_s, besov_p, besov_q, besov_h0);
        if (!besov_m.empty()) bp.m = besov_m;
        if (!besov_k.empty()) bp.k = besov_k;
        bp.quad_points = besov_quad_points;
        bp.validate(grid_dim);
        return bp;
    }

    BesovParams besov_time() const {
        BesovParams bp = BesovParams::standard(1, time_s, time_p, time_q, time_h0);
        bp.m = {1};
        bp.quad_points = besov_quad_points;
        bp.validate(1);
        return bp;
    }

    LambdaSweep sweep() const {
        LambdaSweep sw = default_lambda_sweep(phi2, sweep_decade_min, sweep_decade_max);
        if (!sweep_arguments.empty()) sw.arguments = sweep_arguments;
        return sw;
    }

    NormSpec norm() const {
        if (norm_mode == "lp") return NormSpec::lp(norm_p);
        if (norm_mode != "besov")
            throw std::invalid_argument("config: norm_mode must be 'besov' or 'lp'");
        return NormSpec::besov_norm_spec(besov());
    }

    ProbeSpec probe() const {
        ProbeSpec p;
        if (probe_kind == "mode") {
            p.kind = ProbeSpec::Kind::Mode;
        } else if (probe_kind == "bump") {
            p.kind = ProbeSpec::Kind::Bump;
        } else if (probe_kind == "random_bandlimited") {
            p.kind = ProbeSpec::Kind::RandomBandlimited;
        } else if (probe_kind == "constant") {
            p.kind = ProbeSpec::Kind::Constant;
        } else {
            throw std::invalid_argument("config: probe_kind '" + probe_kind + "' unknown");
        }
        p.mode = probe_mode;
        p.center = probe_center;
        p.width = probe_width;
        p.seed = probe_seed;
        p.cutoff = probe_cutoff;
        return p;
    }
};

namespace detail {

inline double json_number(const nlohmann::json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("config: key '" + key + "': expected a number or \"inf\"");
}

inline std::vector<double> json_number_list(const nlohmann::json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(json_number(e, key));
        return out;
    }
    out.push_back(json_number(v, key));
    return out;
}

inline std::vector<int> json_int_list(const nlohmann::json& v, const std::string& key) {
    std::vector<int> out;
    for (double d : json_number_list(v, key)) out.push_back(static_cast<int>(d));
    return out;
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j, const std::string& command) {
    ExperimentConfig c;
    c.command = command;
    static const std::vector<std::string> known = {
        "grid_dim", "grid_radius", "grid_points", "kernel_builtin", "kernel_params", "kernel_file",
        "besov_s", "besov_p", "besov_q", "besov_m", "besov_k", "besov_h0", "besov_quad_points",
        "time_s", "time_p", "time_q", "time_h0", "sweep_decade_min", "sweep_decade_max",
        "sweep_arguments", "phi2", "probe_kind", "probe_mode", "probe_center", "probe_width",
        "probe_seed", "probe_cutoff", "probe_count", "lambda_re", "lambda_im", "rhs_file",
        "horizon", "steps", "forcing_dir", "variant", "uniformity_factor", "resolvent_bound",
        "residual_tol", "parabolic_residual_tol", "parabolic_bound", "uniformity_radius", "embed_alpha", "embed_l",
        "embed_p1", "mu_list", "h_sweep", "norm_mode", "norm_p", "out_dir", "seed", "threads",
        "strict", "command"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }
    auto num = [&](const char* key, double fallback) {
        return j.contains(key) ? detail::json_number(j.at(key), key) : fallback;
    };
    auto str = [&](const char* key, const std::string& fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_string()) throw std::invalid_argument(std::string("config: key '") + key + "': expected a string");
        return j.at(key).get<std::string>();
    };
    c.grid_dim = static_cast<int>(num("grid_dim", c.grid_dim));
    c.grid_radius = num("grid_radius", c.grid_radius);
    c.grid_points = static_cast<int>(num("grid_points", c.grid_points));
    c.kernel_builtin = str("kernel_builtin", c.kernel_builtin);
    if (j.contains("kernel_params")) c.kernel_params = detail::json_number_list(j.at("kernel_params"), "kernel_params");
    c.kernel_file = str("kernel_file", c.kernel_file);
    c.besov_s = num("besov_s", c.besov_s);
    c.besov_p = num("besov_p", c.besov_p);
    c.besov_q = num("besov_q", c.besov_q);
    if (j.contains("besov_m")) c.besov_m = detail::json_int_list(j.at("besov_m"), "besov_m");
    if (j.contains("besov_k")) c.besov_k = detail::json_int_list(j.at("besov_k"), "besov_k");
    c.besov_h0 = num("besov_h0", c.besov_h0);
    c.besov_quad_points = static_cast<int>(num("besov_quad_points", c.besov_quad_points));
    c.time_s = num("time_s", c.time_s);
    c.time_p = num("time_p", c.time_p);
    c.time_q = num("time_q", c.time_q);
    c.time_h0 = num("time_h0", c.time_h0);
    c.sweep_decade_min = static_cast<int>(num("sweep_decade_min", c.sweep_decade_min));
    c.sweep_decade_max = static_cast<int>(num("sweep_decade_max", c.sweep_decade_max));
    if (j.contains("sweep_arguments")) c.sweep_arguments = detail::json_number_list(j.at("sweep_arguments"), "sweep_arguments");
    c.phi2 = num("phi2", c.phi2);
    c.probe_kind = str("probe_kind", c.probe_kind);
    if (j.contains("probe_mode")) c.probe_mode = detail::json_int_list(j.at("probe_mode"), "probe_mode");
    if (j.contains("probe_center")) c.probe_center = detail::json_number_list(j.at("probe_center"), "probe_center");
    c.probe_width = num("probe_width", c.probe_width);
    c.probe_seed = static_cast<std::uint64_t>(num("probe_seed", static_cast<double>(c.probe_seed)));
    c.probe_cutoff = static_cast<int>(num("probe_cutoff", c.probe_cutoff));
    c.probe_count = static_cast<int>(num("probe_count", c.probe_count));
    c.lambda_re = num("lambda_re", c.lambda_re);
    c.lambda_im = num("lambda_im", c.lambda_im);
    c.rhs_file = str("rhs_file", c.rhs_file);
    c.horizon = num("horizon", c.horizon);
    c.steps = static_cast<int>(num("steps", c.steps));
    c.forcing_dir = str("forcing_dir", c.forcing_dir);
    c.variant = str("variant", c.variant);
    c.uniformity_factor = num("uniformity_factor", c.uniformity_factor);
    c.uniformity_radius = num("uniformity_radius", c.uniformity_radius);
    c.resolvent_bound = num("resolvent_bound", c.resolvent_bound);
    c.residual_tol = num("residual_tol", c.residual_tol);
    c.parabolic_residual_tol = num("parabolic_residual_tol", c.parabolic_residual_tol);
    c.parabolic_bound = num("parabolic_bound", c.parabolic_bound);
    if (j.contains("embed_alpha")) c.embed_alpha = detail::json_number_list(j.at("embed_alpha"), "embed_alpha");
    c.embed_l = num("embed_l", c.embed_l);
    c.embed_p1 = num("embed_p1", c.embed_p1);
    if (j.contains("mu_list")) c.mu_list = detail::json_number_list(j.at("mu_list"), "mu_list");
    if (j.contains("h_sweep")) c.h_sweep = detail::json_number_list(j.at("h_sweep"), "h_sweep");
    c.norm_mode = str("norm_mode", c.norm_mode);
    c.norm_p = num("norm_p", c.norm_p);
    c.out_dir = str("out_dir", c.out_dir);
    c.seed = static_cast<std::uint64_t>(num("seed", static_cast<double>(c.seed)));
    c.threads = static_cast<int>(num("threads", c.threads));
    if (j.contains("strict")) {
        if (!j.at("strict").is_boolean()) throw std::invalid_argument("config: key 'strict': expected a boolean");
        c.strict = j.at("strict").get<bool>();
    }

    if (c.variant != "convolved" && c.variant != "plain")
        throw std::invalid_argument("config: variant must be 'convolved' or 'plain'");
    if (!c.kernel_file.empty() && !std::filesystem::exists(c.kernel_file))
        throw std::invalid_argument("config: kernel_file '" + c.kernel_file + "' does not exist");
    if (!c.rhs_file.empty() && !std::filesystem::exists(c.rhs_file))
        throw std::invalid_argument("config: rhs_file '" + c.rhs_file + "' does not exist");
    if (!c.forcing_dir.empty() && !std::filesystem::is_directory(c.forcing_dir))
        throw std::invalid_argument("config: forcing_dir '" + c.forcing_dir + "' does not exist");
    return c;
}

inline ExperimentConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    return parse_config(j, command);
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    auto pq = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    nlohmann::json j;
    j["command"] = c.command;
    j["grid_dim"] = c.grid_dim;
    j["grid_radius"] = c.grid_radius;
    j["grid_points"] = c.grid_points;
    j["kernel_builtin"] = c.kernel_builtin;
    j["kernel_params"] = c.kernel_params;
    j["kernel_file"] = c.kernel_file;
    j["besov_s"] = c.besov_s;
    j["besov_p"] = pq(c.besov_p);
    j["besov_q"] = pq(c.besov_q);
    j["besov_m"] = c.besov_m;
    j["besov_k"] = c.besov_k;
    j["besov_h0"] = c.besov_h0;
    j["besov_quad_points"] = c.besov_quad_points;
    j["time_s"] = c.time_s;
    j["time_p"] = pq(c.time_p);
    j["time_q"] = pq(c.time_q);
    j["time_h0"] = c.time_h0;
    j["sweep_decade_min"] = c.sweep_decade_min;
    j["sweep_decade_max"] = c.sweep_decade_max;
    j["sweep_arguments"] = c.sweep_arguments;
    j["phi2"] = c.phi2;
    j["probe_kind"] = c.probe_kind;
    j["probe_mode"] = c.probe_mode;
    j["probe_center"] = c.probe_center;
    j["probe_width"] = c.probe_width;
    j["probe_seed"] = c.probe_seed;
    j["probe_cutoff"] = c.probe_cutoff;
    j["probe_count"] = c.probe_count;
    j["lambda_re"] = c.lambda_re;
    j["lambda_im"] = c.lambda_im;
    j["rhs_file"] = c.rhs_file;
    j["horizon"] = c.horizon;
    j["steps"] = c.steps;
    j["forcing_dir"] = c.forcing_dir;
    j["variant"] = c.variant;
    j["uniformity_factor"] = c.uniformity_factor;
    j["uniformity_radius"] = c.uniformity_radius;
    j["resolvent_bound"] = c.resolvent_bound;
    j["residual_tol"] = c.residual_tol;
    j["parabolic_residual_tol"] = c.parabolic_residual_tol;
    j["parabolic_bound"] = c.parabolic_bound;
    j["embed_alpha"] = c.embed_alpha;
    j["embed_l"] = c.embed_l;
    j["embed_p1"] = c.embed_p1;
    j["mu_list"] = c.mu_list;
    j["h_sweep"] = c.h_sweep;
    j["norm_mode"] = c.norm_mode;
    j["norm_p"] = c.norm_p;
    j["out_dir"] = c.out_dir;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["strict"] = c.strict;
    return j;
}

// ---------------------------------------------------------------------------
// Report files and the run manifest.
// ---------------------------------------------------------------------------

struct Criterion {
    std::string name;
    bool pass = false;
    double value = 0.0;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    nlohmann::json config_echo;
    std::vector<StageTiming> stages;
    std::vector<Criterion> criteria;

    bool pass() const {
        for (const Criterion& c : criteria)
            if (!c.pass) return false;
        return true;
    }
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool_version"] = tool_version;
        j["command"] = command;
        j["config"] = config_echo;
        j["stages"] = nlohmann::json::array();
        for (const StageTiming& s : stages) j["stages"].push_back({{"name", s.name}, {"seconds", s.seconds}});
        j["criteria"] = nlohmann::json::array();
        for (const Criterion& c : criteria)
            j["criteria"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
        j["pass"] = pass();
        return j;
    }
};

struct RunResult {
    RunManifest manifest;
    std::filesystem::path out_dir;
    int exit_code(bool strict) const {
        return manifest.pass() ? kExitOk : (strict ? kExitCriterionFail : kExitOk);
    }
};

namespace detail {

/// One row of a report table: fixed column order, values formatted with
/// %.17g so serial reruns are byte-identical.
struct TableRow {
    std::vector<std::pair<std::string, nlohmann::json>> fields;
    void add(const std::string& key, double v) { fields.emplace_back(key, v); }
    void add(const std::string& key, const std::string& v) { fields.emplace_back(key, v); }
    void add(const std::string& key, bool v) { fields.emplace_back(key, v); }
};

inline void write_table(const std::filesystem::path& dir, const std::vector<TableRow>& rows) {
    std::ofstream csv(dir / "report.csv");
    nlohmann::json jrows = nlohmann::json::array();
    if (!rows.empty()) {
        for (std::size_t i = 0; i < rows[0].fields.size(); ++i)
            csv << (i ? "," : "") << rows[0].fields[i].first;
        csv << "\n";
    }
    for (const TableRow& row : rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < row.fields.size(); ++i) {
            const auto& [key, val] = row.fields[i];
            if (i) csv << ",";
            if (val.is_number_float()) csv << fmt_double(val.get<double>());
            else if (val.is_boolean()) csv << (val.get<bool>() ? "1" : "0");
            else if (val.is_string()) csv << val.get<std::string>();
            else csv << val.dump();
            obj[key] = val;
        }
        csv << "\n";
        jrows.push_back(obj);
    }
    std::ofstream(dir / "report.json") << jrows.dump(2) << "\n";
}

inline void append_symbol_report(std::vector<TableRow>& rows, const std::string& check,
                                 const SymbolReport& rep) {
    {
        TableRow row;
        row.add("check", check);
        row.add("label", std::string("headline"));
        row.add("value", rep.value);
        row.add("pass", rep.pass);
        rows.push_back(row);
    }
    for (const ReportRow& r : rep.rows) {
        TableRow row;
        row.add("check", check);
        row.add("label", r.label);
        row.add("value", r.value);
        row.add("pass", r.pass);
        rows.push_back(row);
    }
}

class StageClock {
  public:
    explicit StageClock(RunManifest& m) : manifest_(m) {}
    void finish(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        manifest_.stages.push_back({name, std::chrono::duration<double>(now - last_).count()});
        last_ = now;
    }

  private:
    RunManifest& manifest_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline std::vector<GridFunction> standard_probe_family(const ExperimentConfig& c, const SpatialGrid& grid) {
    std::vector<GridFunction> probes;
    ProbeSpec dc;
    dc.kind = ProbeSpec::Kind::Constant;
    probes.push_back(make_probe(dc, grid));
    ProbeSpec mode;
    mode.kind = ProbeSpec::Kind::Mode;
    mode.mode.assign(static_cast<std::size_t>(grid.dim), 1);
    probes.push_back(make_probe(mode, grid));
    ProbeSpec bump;
    bump.kind = ProbeSpec::Kind::Bump;
    bump.center.assign(static_cast<std::size_t>(grid.dim), 0.0);
    bump.width = 0.5 * grid.radius;
    probes.push_back(make_probe(bump, grid));
    for (int i = 0; i < c.probe_count; ++i) {
        ProbeSpec rnd;
        rnd.kind = ProbeSpec::Kind::RandomBandlimited;
        rnd.seed = c.seed + static_cast<std::uint64_t>(i);
        rnd.cutoff = std::min(c.probe_cutoff, grid.points / 2 - 1);
        probes.push_back(make_probe(rnd, grid));
    }
    return probes;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Experiments.
// ---------------------------------------------------------------------------

inline RunResult run_experiment(const ExperimentConfig& c) {
    RunResult result;
    RunManifest& manifest = result.manifest;
    manifest.command = c.command;
    manifest.config_echo = config_to_json(c);
    result.out_dir = c.out_dir;
    std::filesystem::create_directories(result.out_dir);
    detail::StageClock clock(manifest);

    const SpatialGrid grid = c.grid();
    const KernelSet kernel = c.kernel();
    clock.finish("setup");

    std::vector<detail::TableRow> rows;

    if (c.command == "analyze-symbol") {
        const SymbolReport cond = check_ellipticity(kernel, grid);
        detail::append_symbol_report(rows, "ellipticity", cond);
        manifest.criteria.push_back({"ellipticity", cond.pass, cond.value});
        clock.finish("ellipticity");

        const SymbolReport lower = lower_bound_constant(kernel, c.sweep().points(), grid);
        detail::append_symbol_report(rows, "lower_bound", lower);
        manifest.criteria.push_back({"lower_bound", lower.pass, lower.value});
        clock.finish("lower_bound");

        bool mikhlin_ok = true;
        double mikhlin_sup_all = 0.0;
        auto run_mikhlin = [&](const SymbolTarget& target) {
            try {
                const SymbolReport rep = mikhlin_sup(target, grid);
                detail::append_symbol_report(rows, rep.quantity, rep);
                mikhlin_ok = mikhlin_ok && rep.pass;
                mikhlin_sup_all = std::max(mikhlin_sup_all, rep.value);
            } catch (const std::exception& e) {
                detail::TableRow row;
                row.add("check", "mikhlin[" + target.name + "]");
                row.add("label", std::string(e.what()));
                row.add("value", 0.0);
                row.add("pass", false);
                rows.push_back(row);
                mikhlin_ok = false;
            }
        };
        const std::vector<SectorParameter> lams{
            SectorParameter{cplx{1.0, 0.0}, c.phi2},
            SectorParameter{std::polar(1.0, std::min(c.phi2, kPi / 2.0)), c.phi2}};
        for (int i = 0; i <= 2; ++i)
            for (const SectorParameter& lam : lams) run_mikhlin(sigma_target(i, lam, kernel));
        for (const KernelTerm& t : kernel.terms) run_mikhlin(term_target(t));
        manifest.criteria.push_back({"mikhlin", mikhlin_ok, mikhlin_sup_all});
        clock.finish("mikhlin");

        bool young_ok = true;
        for (const KernelTerm& t : kernel.terms) {
            const SymbolReport rep =
                young_inequality_constant(kernel.order_l, t.alpha, default_young_samples(grid.dim));
            detail::append_symbol_report(rows, "young[" + t.describe + "]", rep);
            young_ok = young_ok && rep.pass;
        }
        manifest.criteria.push_back({"young", young_ok, 0.0});
        clock.finish("young");

        // uniformity in lambda needs a lattice whose frequency range dwarfs
        // the largest swept modulus; it gets its own radius
        const SpatialGrid wide_grid = make_grid(c.grid_dim, c.uniformity_radius, c.grid_points);
        const SymbolReport uni = multiplier_uniformity(kernel, wide_grid, c.sweep());
        detail::append_symbol_report(rows, "multiplier_uniformity", uni);
        manifest.criteria.push_back({"multiplier_uniformity", uni.pass, uni.value});
        clock.finish("multiplier_uniformity");
    } else if (c.command == "verify-coercivity") {
        const GridFunction f = make_probe(c.probe(), grid);
        const CoercivityReport rep = coercivity_report(kernel, f, c.sweep().points(), c.norm(),
                                                       c.variant == "convolved", c.uniformity_factor,
                                                       c.threads);
        for (const CoercivityRow& r : rep.rows) {
            detail::TableRow row;
            row.add("lambda_re", r.lambda.real());
            row.add("lambda_im", r.lambda.imag());
            row.add("alpha_index", static_cast<double>(r.alpha_index));
            row.add("scaled_term_norm", r.scaled_term_norm);
            row.add("u_norm_scaled", r.u_norm_scaled);
            row.add("total_ratio", r.total_ratio);
            rows.push_back(row);
        }
        manifest.criteria.push_back(
            {"uniform", rep.uniform, rep.min_ratio > 0.0 ? rep.max_ratio / rep.min_ratio : 0.0});
        clock.finish("coercivity_sweep");
    } else if (c.command == "verify-resolvent") {
        const std::vector<GridFunction> probes = detail::standard_probe_family(c, grid);
        const SymbolReport rep =
            resolvent_sweep(kernel, probes, c.sweep().points(), c.norm(), c.resolvent_bound, c.threads);
        detail::append_symbol_report(rows, "resolvent_decay", rep);
        manifest.criteria.push_back({"resolvent_bounded", rep.pass, rep.value});
        clock.finish("resolvent_sweep");

        const SectorParameter lam{cplx{1.0, 0.0}, c.phi2};
        const SectorParameter mu{std::polar(10.0, std::min(c.phi2, 0.5)), c.phi2};
        const double ident = resolvent_identity_residual(kernel, probes.back(), lam, mu);
        detail::TableRow row;
        row.add("check", std::string("resolvent_identity"));
        row.add("label", std::string("residual"));
        row.add("value", ident);
        row.add("pass", ident <= 1e-9);
        rows.push_back(row);
        manifest.criteria.push_back({"resolvent_identity", ident <= 1e-9, ident});
        clock.finish("resolvent_identity");
    } else if (c.command == "verify-embedding") {
        const GridFunction u = make_probe(c.probe(), grid);
        std::vector<double> hs = c.h_sweep;
        if (hs.empty())
            for (int e = -6; e <= 0; ++e) hs.push_back(std::pow(2.0, e));
        const BesovParams bp = c.besov();
        const double p1 = c.embed_p1 > 0.0 ? c.embed_p1 : bp.p;
        bool ok = true;
        double sup = 0.0;
        for (double mu : c.mu_list) {
            const SymbolReport rep =
                embedding_report(u, FractionalMultiIndex(c.embed_alpha), c.embed_l, bp, p1, mu, hs);
            std::ostringstream os;
            os << "embedding mu=" << mu;
            detail::append_symbol_report(rows, os.str(), rep);
            ok = ok && rep.pass;
            sup = std::max(sup, rep.value);
        }
        manifest.criteria.push_back({"embedding_bounded", ok, sup});
        clock.finish("embedding");
    } else if (c.command == "besov-norm") {
        const GridFunction f =
            c.rhs_file.empty() ? make_probe(c.probe(), grid) : read_grid_csv(grid, c.rhs_file);
        const BesovComponents comps = besov_components(f, c.besov());
        detail::TableRow row;
        row.add("check", std::string("besov_norm"));
        row.add("label", std::string("total"));
        row.add("value", comps.total());
        row.add("pass", std::isfinite(comps.total()));
        rows.push_back(row);
        {
            detail::TableRow lp;
            lp.add("check", std::string("besov_norm"));
            lp.add("label", std::string("lp_part"));
            lp.add("value", comps.lp_part);
            lp.add("pass", true);
            rows.push_back(lp);
        }
        for (std::size_t a = 0; a < comps.seminorms.size(); ++a) {
            detail::TableRow sr;
            sr.add("check", std::string("besov_norm"));
            sr.add("label", "seminorm_axis_" + std::to_string(a));
            sr.add("value", comps.seminorms[a]);
            sr.add("pass", true);
            rows.push_back(sr);
        }
        manifest.criteria.push_back({"norm_finite", std::isfinite(comps.total()), comps.total()});
        clock.finish("besov_norm");
    } else if (c.command == "solve-elliptic") {
        const GridFunction f =
            c.rhs_file.empty() ? make_probe(c.probe(), grid) : read_grid_csv(grid, c.rhs_file);
        EllipticProblem p{kernel, SectorParameter{cplx{c.lambda_re, c.lambda_im}, c.phi2}, f};
        const GridFunction u = solve_elliptic(p);
        const double res = elliptic_residual(u, p);
        write_grid_csv(u, (result.out_dir / "solution.csv").string());
        detail::TableRow row;
        row.add("check", std::string("elliptic_solve"));
        row.add("label", std::string("relative_residual"));
        row.add("value", res);
        row.add("pass", res <= c.residual_tol);
        rows.push_back(row);
        manifest.criteria.push_back({"residual", res <= c.residual_tol, res});
        clock.finish("solve");
    } else if (c.command == "solve-parabolic") {
        MixedFunction forcing;
        if (!c.forcing_dir.empty()) {
            forcing.dt = c.horizon / c.steps;
            for (int j = 0; j <= c.steps; ++j) {
                char name[32];
                std::snprintf(name, sizeof(name), "slice_%04d.csv", j);
                const std::filesystem::path p = std::filesystem::path(c.forcing_dir) / name;
                if (!std::filesystem::exists(p))
                    throw std::invalid_argument("forcing_dir: missing " + p.string());
                forcing.slices.push_back(read_grid_csv(grid, p.string()));
            }
        } else {
            const GridFunction shape = make_probe(c.probe(), grid);
            forcing.dt = c.horizon / c.steps;
            forcing.slices.assign(static_cast<std::size_t>(c.steps) + 1, shape);
        }
        ParabolicProblem p{kernel, forcing, c.horizon, c.steps};
        const ParabolicSolution sol = duhamel_solve(p);
        for (std::size_t j = 0; j < sol.u.slices.size(); ++j) {
            char name[32];
            std::snprintf(name, sizeof(name), "slice_%04zu.csv", j);
            write_grid_csv(sol.u.slices[j], (result.out_dir / name).string());
        }
        double res_max = 0.0;
        for (std::size_t j = 0; j < sol.residual_norms.size(); ++j) {
            detail::TableRow row;
            row.add("check", std::string("parabolic_residual"));
            row.add("label", "step_" + std::to_string(j));
            row.add("value", sol.residual_norms[j]);
            row.add("pass", true);
            rows.push_back(row);
            res_max = std::max(res_max, sol.residual_norms[j]);
        }
        manifest.criteria.push_back(
            {"residual_midpoint", res_max <= c.parabolic_residual_tol, res_max});
        clock.finish("duhamel_solve");

        const CoercivityReport rep =
            parabolic_coercivity_report(p, c.besov(), c.besov_time(), c.parabolic_bound);
        manifest.criteria.push_back({"mixed_norm_bounded", rep.uniform, rep.max_ratio});
        clock.finish("mixed_norm_report");
    } else {
        throw std::invalid_argument("unknown command '" + c.command + "'");
    }

    detail::write_table(result.out_dir, rows);
    std::ofstream(result.out_dir / "manifest.json") << manifest.to_json().dump(2) << "\n";
    clock.finish("write_reports");
    return result;
}

} // namespace fracspec
