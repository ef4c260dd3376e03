// Command-line front end: simulate | return-map | analyze | certify |
// appendix-verify. Exit codes: 0 success, 1 invalid input, 2 verification or
// certification failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxdde/chaos.hpp"
#include "maxdde/closed_form.hpp"
#include "maxdde/io.hpp"
#include "maxdde/return_map.hpp"

using nlohmann::json;
using namespace maxdde;

namespace {

struct CommonArgs {
    std::string problem_file;
    std::string preset;
    std::string out_dir = ".";
    int grid = 2000;
    double dt = 0.0;
    double tol = 0.0;     // event qualification window; 0 = default (1e-3 T)
    double tmax = 350.0;
    double p = 0.0;
    long long seed = 0;
    int max_period = 3;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_p = false) {
    auto* grp = cmd->add_option_group("problem", "problem selection");
    grp->add_option("--problem", a.problem_file, "problem definition JSON file");
    grp->add_option("--preset", a.preset, "built-in problem: ex1 | ex2")
        ->check(CLI::IsMember({"ex1", "ex2"}));
    grp->require_option(1);
    cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--grid", a.grid, "grid size for scans")->capture_default_str();
    cmd->add_option("--dt", a.dt, "integration step (default h/2000)");
    cmd->add_option("--tol", a.tol, "event qualification window (default 1e-3 T)");
    cmd->add_option("--tmax", a.tmax, "simulation end time")->capture_default_str();
    if (with_p) cmd->add_option("--p", a.p, "initial peak value")->capture_default_str();
    cmd->add_option("--seed", a.seed, "seed recorded in outputs")->capture_default_str();
    cmd->add_option("--max-period", a.max_period, "orbit census depth (certify)")
        ->capture_default_str();
}

NormalizedProblem load(const CommonArgs& a) {
    if (!a.preset.empty()) return preset_problem(a.preset);
    return load_problem_file(a.problem_file);
}

ReturnMap make_map(const CommonArgs& a) {
    ReturnMapOptions o;
    o.dt = a.dt;
    o.event_eps = a.tol;
    return ReturnMap(load(a), o);
}

std::filesystem::path out_path(const CommonArgs& a, const std::string& name) {
    std::filesystem::create_directories(a.out_dir);
    return std::filesystem::path(a.out_dir) / name;
}

json root_with_meta(const CommonArgs& a) {
    json j;
    j["seed"] = a.seed;
    j["problem"] = a.preset.empty() ? a.problem_file : a.preset;
    return j;
}

int cmd_simulate(const CommonArgs& a) {
    const auto prob = load(a);
    // start on the forcing branch when p lies in K, else at the time origin
    const double q = (a.p >= 0.0 && a.p <= prob.ftilde_max())
                         ? prob.ftilde_inverse(a.p)
                         : 0.0;
    IntegrateOptions io;
    io.dt = a.dt;
    io.event_eps = a.tol;
    const auto tr = integrate(prob, q, History::constant(a.p), q + a.tmax, io);
    const auto events = detect_qualified_maxima(prob, tr, io.event_eps);

    CsvWriter traj(out_path(a, "trajectory.csv").string(),
                   {"t", "u", "uprime", "window_max", "f"});
    for (std::size_t i = tr.history_len(); i < tr.size(); ++i) {
        const double t = tr.times()[i];
        traj.row({t, tr.values()[i], tr.derivs()[i], tr.window_maxima()[i], prob.f(t)});
    }
    CsvWriter evs(out_path(a, "events.csv").string(), {"tau", "value", "branch_j"});
    for (const auto& ev : events)
        evs.row({ev.tau, ev.value, static_cast<double>(ev.branch_j)});
    // delayed projection (u(t), u(t-h)) for phase portraits
    CsvWriter proj(out_path(a, "projection.csv").string(), {"t", "u", "u_delay"});
    for (std::size_t i = tr.history_len(); i < tr.size(); ++i) {
        const double t = tr.times()[i];
        if (t < q + prob.params().h) continue;
        proj.row({t, tr.values()[i], tr.value(t - prob.params().h)});
    }
    std::cout << "wrote trajectory.csv (" << tr.size() - tr.history_len()
              << " rows), events.csv (" << events.size() << " rows), projection.csv\n";
    return 0;
}

int cmd_return_map(const CommonArgs& a) {
    if (a.grid < 2) throw Error("return-map: --grid must be at least 2");
    const auto rm = make_map(a);
    const double top = rm.problem().ftilde_max() * 0.9995;
    CsvWriter csv(out_path(a, "return_map.csv").string(),
                  {"p", "q", "lambda", "mu", "nu_star", "R", "Rprime", "branch_j",
                   "u_shaped"});
    for (int i = 0; i < a.grid; ++i) {
        const double p = top * i / (a.grid - 1);
        const auto s = rm.eval(p);
        double deriv = std::numeric_limits<double>::quiet_NaN();
        try {
            deriv = rm.derivative(s);
        } catch (const Error&) {
        }
        csv.row({s.p, s.q, s.lambda, s.mu, s.nu_star, s.R, deriv,
                 static_cast<double>(s.branch_j), s.u_shaped ? 1.0 : 0.0});
    }
    std::cout << "wrote return_map.csv (" << a.grid << " rows)\n";
    return 0;
}

int cmd_analyze(const CommonArgs& a) {
    const auto rm = make_map(a);
    const auto& prob = rm.problem();
    json j = root_with_meta(a);
    const auto st = stability_check(prob.params());
    j["stability"] = {{"stable", st.stable},
                      {"branch", st.branch == StabilityBranch::SmallDelay  ? "small-delay"
                                 : st.branch == StabilityBranch::LargeDelay ? "large-delay"
                                                                            : "none"}};
    j["K"] = {0.0, prob.ftilde_max()};
    j["beta"] = {{"normalized", prob.beta()}, {"raw", prob.to_raw(prob.beta())}};
    j["shift"] = prob.shift();
    j["offset"] = prob.offset();

    const auto b1 = rm.beta1();
    j["beta1"] = {{"normalized", b1.q}, {"raw", b1.q_raw}, {"p", b1.p}};
    if (const auto q0 = rm.q0_root()) {
        j["q0"] = {{"normalized", q0->q}, {"raw", q0->q_raw}, {"p", q0->p}};
        j["p_c"] = q0->p;
    } else {
        j["q0"] = nullptr;
    }

    const auto& fs = rm.fundamental();
    const auto [a1, b2] = fs.V_roots();
    if (a1) j["alpha_star"] = *a1;
    if (b2) j["beta_star"] = *b2;

    const double R0 = rm(0.0);
    j["R0"] = R0;
    j["RR0"] = rm(R0);

    j["discontinuities"] = json::array();
    const double hi = prob.ftilde_max() * 0.97;
    for (const auto& d : rm.find_discontinuities(0.02, hi, std::min(a.grid, 400))) {
        j["discontinuities"].push_back({{"p", d.p},
                                        {"R_left", d.R_left},
                                        {"R_at", d.R_at},
                                        {"contract_ok", d.contract_ok},
                                        {"j_left", d.j_left},
                                        {"j_right", d.j_right}});
    }

    j["fixed_points"] = json::array();
    for (const auto& fp : rm.fixed_points(1, 1e-3, hi, std::min(a.grid, 400))) {
        j["fixed_points"].push_back({{"p", fp.p},
                                     {"multiplier", fp.multiplier},
                                     {"period_in_T", fp.period_in_T}});
    }

    std::ofstream out(out_path(a, "analysis.json"));
    out << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_certify(const CommonArgs& a) {
    const auto rm = make_map(a);
    ChaosOptions copts;
    copts.image_grid = a.grid > 2 ? a.grid : 2001;
    copts.max_period = a.max_period;
    const auto cert = certify(rm, copts);

    json j = root_with_meta(a);
    j["intervals"] = {{"p0", cert.intervals.p0},
                      {"alpha", cert.intervals.alpha},
                      {"kappa", cert.intervals.kappa},
                      {"p1", cert.intervals.p1},
                      {"R0", cert.intervals.R0}};
    j["covering_margins"] = json::array();
    const char* names[3] = {"I2uI3_in_R(I1)", "I1_in_R(I2)", "I2uI3_in_R(I3)"};
    for (int i = 0; i < 3; ++i)
        j["covering_margins"].push_back({{"relation", names[i]},
                                         {"margin", cert.relations[i].margin},
                                         {"image", {cert.relations[i].image_lo,
                                                    cert.relations[i].image_hi}},
                                         {"pinned_residual",
                                          cert.relations[i].pinned_residual}});
    j["adjacency"] = cert.adjacency;
    j["transitive_power"] = cert.transitive_power;
    j["entropy_lower"] = cert.entropy_lower;
    j["spectral_radius"] = cert.spectral_radius;
    j["orbit_counts"] = cert.orbit_counts;
    j["located_orbits"] = json::array();
    for (const auto& o : cert.located_orbits)
        j["located_orbits"].push_back({{"n", o.n},
                                       {"word", o.word},
                                       {"points", o.points},
                                       {"minimal_period", o.minimal_period},
                                       {"period_in_T", o.period_in_T},
                                       {"unresolved", o.unresolved}});

    std::ofstream out(out_path(a, "certificate.json"));
    out << j.dump(2) << "\n";
    std::cout << summarize(cert);
    return 0;
}

int cmd_appendix_verify(const CommonArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = closed_form::verify_minima(a.grid);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json j;
    j["seed"] = a.seed;
    j["grid"] = rep.grid;
    j["min_psi"] = rep.min_psi;
    j["argmin_psi"] = rep.argmin_psi;
    j["min_increment"] = rep.min_increment;
    j["arg_increment"] = rep.arg_increment;
    j["max_phi"] = rep.max_phi;
    j["argmax_phi"] = rep.argmax_phi;
    j["tolerances"] = {{"reported_digits", 4}};
    j["runtime_seconds"] = secs;
    std::ofstream out(out_path(a, "appendix_verify.json"));
    out << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver and return-map analysis for the forced equation with "
                 "a sliding-window maximum"};
    app.require_subcommand(1);

    CommonArgs a_sim, a_map, a_ana, a_cert, a_app;
    auto* sim = app.add_subcommand("simulate", "integrate and export CSV");
    add_common(sim, a_sim, /*with_p=*/true);
    auto* rmc = app.add_subcommand("return-map", "sample the return map on a grid");
    add_common(rmc, a_map);
    auto* ana = app.add_subcommand("analyze", "constants, jumps and fixed points");
    add_common(ana, a_ana);
    auto* cer = app.add_subcommand("certify", "build the covering certificate");
    add_common(cer, a_cert);
    auto* avf = app.add_subcommand("appendix-verify",
                                   "grid minimization of the closed-form bounds");
    avf->add_option("--grid", a_app.grid, "grid per axis")->capture_default_str();
    avf->add_option("--out", a_app.out_dir, "output directory")->capture_default_str();
    avf->add_option("--seed", a_app.seed, "seed recorded in outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (sim->parsed()) return cmd_simulate(a_sim);
        if (rmc->parsed()) return cmd_return_map(a_map);
        if (ana->parsed()) return cmd_analyze(a_ana);
        if (cer->parsed()) return cmd_certify(a_cert);
        if (avf->parsed()) return cmd_appendix_verify(a_app);
    } catch (const Error& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        // verification/certification failures exit 2, invalid input exits 1
        if (what.find("certificate refused") != std::string::npos ||
            what.find("covering") != std::string::npos ||
            what.find("build_intervals") != std::string::npos)
            return 2;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
