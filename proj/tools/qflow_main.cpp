// Config-driven front end: batch construction, verification and report
// emission on top of the core library. All data files are deterministic
// for a fixed config (fixed RNG seed, no timestamps).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qf/algebra.hpp"
#include "qf/dynamics.hpp"
#include "qf/sphere.hpp"

using json = nlohmann::ordered_json;
using namespace qf;

namespace {

constexpr const char* k_schema = "quartic-flow/1";

struct run_config {
    std::string case_name = "trig";
    double mu = 1.0;
    std::vector<double> A{}; // a0..a4 (a5, a6 derived from the seed)
    double x0 = 0, h0 = 0, p0 = 1;
    std::vector<double> range{-1.0, 1.0};
    double tol = 1e-12;
    double cert_tol = 1e-10;
    std::uint64_t rng_seed = 7;
    std::size_t n_points = 100;
    std::string out_dir = ".";

    // flow block
    std::vector<double> flow_init{};
    double t_end = 10.0;
    double dt_sample = 0.01;
    bool clip_to_profile = true;
    double closure_tol = 1e-4;
    double y_period = 0.0; // wrap y modulo this before closure detection (sphere charts: 2 pi)

    // sphere block
    double sA2 = 0, sA5 = 0, sA6 = 0;
};

int exit_code_for(errc c) {
    switch (c) {
        case errc::config_error:
        case errc::io_error:
        case errc::out_of_range:
        case errc::all_zero_parameters:
        case errc::nonpositive_mu:
        case errc::zero_scale:
        case errc::degenerate_seed:
        case errc::linear_case_unsupported:
        case errc::chart_domain:
            return 2;
        default:
            return 3; // numerical abort
    }
}

void load_config_file(const std::string& path, run_config& c) {
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw error(errc::config_error, std::string("config parse: ") + e.what());
    }
    if (j.value("schema", "") != k_schema)
        throw error(errc::config_error, "config schema must be " + std::string(k_schema));
    c.case_name = j.value("case", c.case_name);
    c.mu = j.value("mu", c.mu);
    if (j.contains("A")) c.A = j.at("A").get<std::vector<double>>();
    if (j.contains("seed_point")) {
        const json& s = j.at("seed_point");
        c.x0 = s.value("x0", c.x0);
        c.h0 = s.value("h0", c.h0);
        c.p0 = s.value("p0", c.p0);
    }
    if (j.contains("range")) c.range = j.at("range").get<std::vector<double>>();
    c.tol = j.value("tol", c.tol);
    c.cert_tol = j.value("cert_tol", c.cert_tol);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.n_points = j.value("n_points", c.n_points);
    c.out_dir = j.value("out", c.out_dir);
    if (j.contains("flow")) {
        const json& f = j.at("flow");
        if (f.contains("init")) c.flow_init = f.at("init").get<std::vector<double>>();
        c.t_end = f.value("t_end", c.t_end);
        c.dt_sample = f.value("dt_sample", c.dt_sample);
        c.clip_to_profile = f.value("clip_to_profile", c.clip_to_profile);
        c.closure_tol = f.value("closure_tol", c.closure_tol);
        c.y_period = f.value("y_period", c.y_period);
    }
    if (j.contains("sphere")) {
        const json& s = j.at("sphere");
        c.sA2 = s.value("A2", c.sA2);
        c.sA5 = s.value("A5", c.sA5);
        c.sA6 = s.value("A6", c.sA6);
    }
}

parameter_set params_from(const run_config& c) {
    parameter_set p;
    p.tag = case_from_name(c.case_name);
    p.mu = c.mu;
    if (c.A.size() != 5 && c.A.size() != 7)
        throw error(errc::config_error, "--A needs a0,...,a4 (optionally a5,a6)");
    for (std::size_t k = 0; k < c.A.size(); ++k) p.A[k] = c.A[k];
    return p;
}

metric_profile trace_from(const run_config& c) {
    if (c.range.size() != 2 || !(c.range[0] < c.range[1]))
        throw error(errc::config_error, "--range needs LO,HI with LO < HI");
    return trace_profile(params_from(c), {c.x0, c.h0, c.p0}, c.range[0], c.range[1], c.tol);
}

json params_json(const parameter_set& p) {
    return json{{"case", case_name(p.tag)},
                {"mu", p.mu},
                {"A", std::vector<double>(p.A.begin(), p.A.end())}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error(errc::io_error, "cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::filesystem::path out_path(const run_config& c, const char* name) {
    std::filesystem::create_directories(c.out_dir);
    return std::filesystem::path(c.out_dir) / name;
}

std::string profile_csv(const metric_profile& prof) {
    std::string s = "x,h,p,h_xx,E1,E2\n";
    char line[256];
    for (const grid_point& g : prof.grid) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.x, g.h, g.p,
                      g.h_xx, g.E1, g.E2);
        s += line;
    }
    return s;
}

json seed_json(const run_config& c) {
    return json{{"x0", c.x0}, {"h0", c.h0}, {"p0", c.p0}};
}

int cmd_trace(const run_config& c) {
    const metric_profile prof = trace_from(c);
    const bool pass = prof.max_E1 < c.cert_tol && prof.max_E2 < c.cert_tol;
    write_text(out_path(c, "profile.csv"), profile_csv(prof));
    write_json(out_path(c, "trace_report.json"),
               json{{"schema", k_schema},
                    {"command", "trace"},
                    {"params", params_json(prof.params)},
                    {"seed", seed_json(c)},
                    {"range", c.range},
                    {"trace_tol", c.tol},
                    {"n_grid", prof.grid.size()},
                    {"x_min", prof.x_min()},
                    {"x_max", prof.x_max()},
                    {"stop_lo", stop_reason_name(prof.stop_lo)},
                    {"stop_hi", stop_reason_name(prof.stop_hi)},
                    {"certificate",
                     {{"max_E1", prof.max_E1},
                      {"max_E2", prof.max_E2},
                      {"tol", c.cert_tol},
                      {"pass", pass}}}});
    return pass ? 0 : 1;
}

int cmd_verify(const run_config& c) {
    const metric_profile prof = trace_from(c);
    const observable_set obs(prof);
    const auto pts = sample_phase_points(prof, c.n_points, c.rng_seed);

    json checks = json::array();
    bool all_pass = true;
    auto add = [&](const char* name, double value, double tol) {
        const bool pass = value < tol;
        all_pass = all_pass && pass;
        checks.push_back(json{{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
    };
    add("residual_E1", prof.max_E1, c.cert_tol);
    add("residual_E2", prof.max_E2, c.cert_tol);
    add("conservation", check_conservation(obs, pts), 1e-9);
    add("eigen_relation", check_eigen_relation(obs, pts), 1e-9);
    add("bracket_vs_fd", check_bracket_consistency(obs, pts), 1e-5);
    add("third_order", check_third_order(prof), 1e-8);
    add("coefficient_odes", check_coefficient_odes(prof), 1e-8);
    if (prof.params.tag != case_tag::linear) {
        add("holomorphy", check_holomorphy(prof).max_deviation, 1e-8);
        add("bracket_identity", verify_bracket_identity(obs, pts).max_residual, 1e-6);
        add("product_identity", verify_product_identity(obs, pts).max_residual, 1e-6);
    }
    write_json(out_path(c, "verify_report.json"), json{{"schema", k_schema},
                                                       {"command", "verify"},
                                                       {"params", params_json(prof.params)},
                                                       {"seed", seed_json(c)},
                                                       {"n_points", c.n_points},
                                                       {"rng_seed", c.rng_seed},
                                                       {"checks", checks},
                                                       {"pass", all_pass}});
    return all_pass ? 0 : 1;
}

int cmd_flow(const run_config& c) {
    if (c.flow_init.size() != 4)
        throw error(errc::config_error, "flow needs init = [x, y, px, py] in the config");
    const metric_profile prof = trace_from(c);
    const observable_set obs(prof);
    flow_options opt;
    opt.t_end = c.t_end;
    opt.dt_sample = c.dt_sample;
    opt.tol = c.tol;
    opt.clip_to_profile = c.clip_to_profile;
    const phase_point init{c.flow_init[0], c.flow_init[1], c.flow_init[2], c.flow_init[3]};
    const flow_result flow = integrate_flow(prof, init, opt);
    flow_result wrapped = flow;
    if (c.y_period > 0)
        for (trajectory_sample& s : wrapped.samples)
            s.state.y -= c.y_period * std::round((s.state.y - init.y) / c.y_period);
    const closure_report closure = detect_closure(wrapped, c.closure_tol);

    std::string csv = "t,x,y,px,py";
    for (const std::string& n : obs.names()) csv += "," + n;
    csv += "\n";
    char buf[64];
    for (const trajectory_sample& s : flow.samples) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        csv += buf;
        const double vals[] = {s.state.x, s.state.y, s.state.px, s.state.py};
        for (double v : vals) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            csv += buf;
        }
        for (double v : s.observables) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            csv += buf;
        }
        csv += "\n";
    }
    write_text(out_path(c, "trajectory.csv"), csv);

    json drift = json::object();
    for (std::size_t i = 0; i < obs.names().size(); ++i) drift[obs.names()[i]] = flow.drift[i];
    write_json(out_path(c, "flow_report.json"),
               json{{"schema", k_schema},
                    {"command", "flow"},
                    {"params", params_json(prof.params)},
                    {"init", c.flow_init},
                    {"t_end", c.t_end},
                    {"flow_tol", c.tol},
                    {"exit", flow_exit_name(flow.exit)},
                    {"t_final", flow.t_final},
                    {"drift", drift},
                    {"closure",
                     {{"tol", c.closure_tol},
                      {"closed", closure.closed},
                      {"period", closure.period},
                      {"min_distance", closure.min_distance}}}});
    return (flow.exit == flow_exit::time_end || flow.exit == flow_exit::range_exit) ? 0 : 3;
}

json pole_json(const pole_report& rep) {
    json j{{"reached", rep.reached}, {"limit_x", rep.limit_x}};
    if (rep.reached) {
        j["exponent"] = rep.exponent.exponent;
        j["n"] = rep.exponent.n;
        j["f1_at_0"] = rep.chart.f1_at_0;
        j["smooth"] = rep.chart.smooth;
        if (rep.checked_extension)
            j["integral_extension"] =
                json{{"bounded", rep.extension.bounded},
                     {"c0_sq", rep.extension.c0_sq},
                     {"growth_slope", std::vector<double>(rep.extension.growth_slope.begin(),
                                                          rep.extension.growth_slope.end())}};
    }
    return j;
}

int cmd_sphere(const run_config& c) {
    const sphere_certificate cert = build_sphere_case(c.sA2, c.sA5, c.sA6, {c.x0, c.h0, c.p0});
    write_json(out_path(c, "sphere_certificate.json"),
               json{{"schema", k_schema},
                    {"command", "sphere"},
                    {"params", params_json(cert.params)},
                    {"blowup",
                     {{"crossings", cert.scan.crossings},
                      {"min_margin", cert.scan.min_margin},
                      {"no_blow_up", cert.scan.no_blow_up}}},
                    {"traced", cert.traced},
                    {"pole_checks",
                     {{"south", pole_json(cert.south)}, {"north", pole_json(cert.north)}}},
                    {"global_extension", cert.global_extension}});
    return 0;
}

int cmd_normalize(const run_config& c) {
    parameter_set p = params_from(c);
    if (c.A.size() == 5) {
        const auto [A5, A6] = derive_A5_A6(p, {c.x0, c.h0, c.p0});
        p.A[5] = A5;
        p.A[6] = A6;
    }
    const normal_form_result nf = normalize(p);
    write_json(out_path(c, "normalize_report.json"),
               json{{"schema", k_schema},
                    {"command", "normalize"},
                    {"input", params_json(p)},
                    {"normal_form", params_json(nf.params)},
                    {"degenerate13", nf.degenerate13},
                    {"transform",
                     {{"x_flip", nf.transform.x_flip},
                      {"y_flip", nf.transform.y_flip},
                      {"x_scale", nf.transform.x_scale},
                      {"x_shift", nf.transform.x_shift},
                      {"gauge_shift", nf.transform.gauge_shift},
                      {"metric_dilation", nf.transform.metric_dilation},
                      {"homogeneity", nf.transform.homogeneity}}}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quartic-flow: superintegrable surface metrics with a quartic integral"};
    app.require_subcommand(1);

    std::string config_path;
    run_config cfg;
    // Shared flags on every subcommand; command-line values override the
    // config file.
    auto wire = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--tol", cfg.tol, "trace/flow tolerance");
        sub->add_option("--seed", cfg.rng_seed, "RNG seed for sample points");
        sub->add_option("--case", cfg.case_name, "trig, hyper or linear");
        sub->add_option("--A", cfg.A, "a0,...,a4")->delimiter(',');
        sub->add_option("--mu", cfg.mu, "frequency parameter");
        sub->add_option("--x0", cfg.x0, "seed x");
        sub->add_option("--h0", cfg.h0, "seed h");
        sub->add_option("--p0", cfg.p0, "seed h_x");
        sub->add_option("--range", cfg.range, "LO,HI")->delimiter(',');
        return sub;
    };
    CLI::App* trace = wire(app.add_subcommand("trace", "trace a profile and certify residuals"));
    CLI::App* verify = wire(app.add_subcommand("verify", "run the verification bundle"));
    CLI::App* flow = wire(app.add_subcommand("flow", "integrate the geodesic flow"));
    CLI::App* sphere = wire(app.add_subcommand("sphere", "global-extension certificate"));
    sphere->add_option("--A2", cfg.sA2, "sphere family A2");
    sphere->add_option("--A5", cfg.sA5, "sphere family A5");
    sphere->add_option("--A6", cfg.sA6, "sphere family A6");
    CLI::App* normalize = wire(app.add_subcommand("normalize", "reduce parameters to normal form"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        // Config file first, then re-parse so explicit flags win.
        if (!config_path.empty()) {
            load_config_file(config_path, cfg);
            app.clear();
            app.parse(argc, argv);
        }
        if (trace->parsed()) return cmd_trace(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (flow->parsed()) return cmd_flow(cfg);
        if (sphere->parsed()) return cmd_sphere(cfg);
        if (normalize->parsed()) return cmd_normalize(cfg);
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
