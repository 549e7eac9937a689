// bsqspec: spectral data, identity checks, inversion and flow runs for
// the operator y''' + (p y)' + p y' + q y on the circle.
//
//   bsqspec spectrum coeffs.json --n-max 4 --out run/spec
//   bsqspec verify   coeffs.json
//   bsqspec invert   spec.json --out run/inv
//   bsqspec flow     coeffs.json --config flow.json --out run/flow

#include "bsq/errors.hpp"
#include "bsq/floquet.hpp"
#include "bsq/flow.hpp"
#include "bsq/io.hpp"
#include "bsq/parallel.hpp"
#include "bsq/spectral_map.hpp"
#include "bsq/three_point.hpp"
#include "bsq/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

enum Exit : int {
    ok = 0,
    other_error = 1,
    parse_error = 2,
    count_mismatch = 3,
    verify_failed = 4,
    no_convergence = 5,
    blow_up = 6,
};

struct RunConfig {
    std::string command;
    std::string input;
    std::string out;
    int n_max = 3;
    int ode_steps = 2048;
    double tol = 1e-8;
    int max_iter = 30;
    int threads = 1;
    int rho_points = 1001;
    std::string initial;  // invert: starting coefficients (zero when empty)
    // verify
    std::optional<int> hill_n_max;  // min(2, n_max) when unset
    // flow
    double dt = 1e-4;
    double t_end = 0.1;
    int modes = 64;
    std::vector<double> snapshots;
    std::vector<int> n_list{1, -1, 2, -2};
    std::string scheme = "lawson";
    double blowup_threshold = 1e3;
};

// Exits are signalled by exception so every path prints one ERROR line.
struct Failure {
    int code;
    std::string kind;
    std::string module;
    std::string message;
};

[[noreturn]] void fail_input(const std::string& msg) { throw Failure{parse_error, "InputError", "cli", msg}; }

template <class T>
void take(const json& cfg, const char* key, T& dst) {
    if (!cfg.contains(key)) return;
    try {
        dst = cfg.at(key).get<T>();
    } catch (const json::exception&) {
        fail_input(std::string("config key \"") + key + "\" has the wrong type");
    }
}

void apply_config_file(const std::string& path, RunConfig& rc) {
    const json cfg = bsq::read_json_file(path);
    if (!cfg.is_object()) fail_input(path + ": config must be a JSON object");
    static const std::vector<std::string> known{"input", "out", "n_max", "ode_steps", "tol", "max_iter", "threads",
                                                "rho_points", "initial", "hill_n_max", "dt", "t_end", "modes",
                                                "snapshots", "n_list", "scheme", "blowup_threshold"};
    for (const auto& [key, value] : cfg.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail_input(path + ": unknown config key \"" + key + "\"");
    take(cfg, "input", rc.input);
    take(cfg, "out", rc.out);
    take(cfg, "n_max", rc.n_max);
    take(cfg, "ode_steps", rc.ode_steps);
    take(cfg, "tol", rc.tol);
    take(cfg, "max_iter", rc.max_iter);
    take(cfg, "threads", rc.threads);
    take(cfg, "rho_points", rc.rho_points);
    take(cfg, "initial", rc.initial);
    if (cfg.contains("hill_n_max")) {
        int v = 0;
        take(cfg, "hill_n_max", v);
        rc.hill_n_max = v;
    }
    take(cfg, "dt", rc.dt);
    take(cfg, "t_end", rc.t_end);
    take(cfg, "modes", rc.modes);
    take(cfg, "snapshots", rc.snapshots);
    take(cfg, "n_list", rc.n_list);
    take(cfg, "scheme", rc.scheme);
    take(cfg, "blowup_threshold", rc.blowup_threshold);
}

void validate(const RunConfig& rc) {
    if (rc.input.empty()) fail_input("no input file given");
    if (rc.n_max < 1) fail_input("n_max must be at least 1");
    if (rc.ode_steps < 16) fail_input("ode_steps must be at least 16");
    if (!(rc.tol > 0.0)) fail_input("tol must be positive");
    if (rc.max_iter < 1) fail_input("max_iter must be positive");
    if (rc.threads < 1) fail_input("threads must be positive");
    if (rc.rho_points < 2) fail_input("rho_points must be at least 2");
    if (rc.hill_n_max && (*rc.hill_n_max < 0 || *rc.hill_n_max > rc.n_max)) fail_input("hill_n_max must lie in [0, n_max]");
    if (!(rc.dt != 0.0) || !std::isfinite(rc.dt)) fail_input("dt must be finite and nonzero");
    if (rc.modes < 1) fail_input("modes must be positive");
    if (!(rc.blowup_threshold > 0.0)) fail_input("blowup_threshold must be positive");
    if (rc.scheme != "lawson" && rc.scheme != "rk4") fail_input("scheme must be \"lawson\" or \"rk4\"");
    for (int n : rc.n_list)
        if (n == 0) fail_input("n_list must not contain 0");
}

bsq::OdeOptions ode_options(const RunConfig& rc) {
    bsq::OdeOptions o;
    o.steps_per_unit = rc.ode_steps;
    return o;
}

std::string out_path(const RunConfig& rc, const std::string& suffix) {
    return (rc.out.empty() ? rc.command : rc.out) + suffix;
}

void write_json(const std::string& path, const json& doc) { bsq::write_text_file(path, doc.dump(2) + "\n"); }

int cmd_spectrum(const RunConfig& rc) {
    const bsq::CoefficientPair u = bsq::coefficients_from_json(bsq::read_json_file(rc.input));
    bsq::check_ball(u, "spectrum");
    const bsq::ThirdOrderOperator op(u, ode_options(rc));

    bsq::ForwardOptions fo;
    fo.threads = rc.threads;
    fo.verify_counts = true;
    fo.ode = ode_options(rc);
    const bsq::SpectralData data = bsq::forward_map(u, rc.n_max, fo);

    // Direct r_n^+- and mu_n of u itself for every |n| <= n_max.
    std::vector<int> ns;
    for (int n = 1; n <= rc.n_max; ++n) {
        ns.push_back(n);
        ns.push_back(-n);
    }
    std::vector<json> rows(ns.size());
    bsq::parallel_for(ns.size(), rc.threads, [&](std::size_t i) {
        const bsq::BranchPoints r = bsq::locate_branch_points(op, ns[i]);
        const bsq::ThreePointEigen mu = bsq::locate_mu(op, ns[i]);
        rows[i] = {{"n", ns[i]}, {"r_minus", r.r_minus}, {"r_plus", r.r_plus}, {"closed", r.closed},
                   {"mu", mu.mu},  {"y1_prime", mu.y1_prime}};
    });
    const bsq::BranchPoints r0 = bsq::locate_r0(op);

    json doc = bsq::to_json(data);
    doc["spectrum"] = rows;
    doc["r0"] = {{"r_minus", r0.r_minus}, {"r_plus", r0.r_plus}, {"closed", r0.closed}};
    write_json(out_path(rc, ".json"), doc);

    std::ostringstream csv;
    bsq::write_rho_csv(csv, op, bsq::SpectralDomain{-rc.n_max}.real_lo(), bsq::SpectralDomain{rc.n_max}.real_hi(),
                       rc.rho_points);
    bsq::write_text_file(out_path(rc, "_rho.csv"), csv.str());
    return ok;
}

int cmd_verify(const RunConfig& rc) {
    const bsq::CoefficientPair u = bsq::coefficients_from_json(bsq::read_json_file(rc.input));
    bsq::VerifyOptions vo;
    vo.n_max = rc.n_max;
    vo.hill_n_max = rc.hill_n_max.value_or(std::min(2, rc.n_max));
    vo.ode = ode_options(rc);
    vo.threads = rc.threads;
    const bsq::VerifyReport rep = bsq::verify_identities(u, vo);
    if (!rc.out.empty()) write_json(out_path(rc, ".json"), bsq::to_json(rep));
    bsq::print_verify_table(std::cout, rep);
    if (const bsq::IdentityCheck* bad = rep.first_failure()) {
        std::ostringstream msg;
        msg << "identity \"" << bad->name << "\" failed: error " << bad->error << " > " << bad->tolerance
            << (bad->detail.empty() ? "" : " at " + bad->detail);
        throw Failure{verify_failed, "VerifyFailed", "verify", msg.str()};
    }
    return ok;
}

int cmd_invert(const RunConfig& rc) {
    const bsq::SpectralData target = bsq::spectral_data_from_json(bsq::read_json_file(rc.input));
    bsq::CoefficientPair u0{bsq::TrigSeries(target.n_max), bsq::TrigSeries(target.n_max)};
    if (!rc.initial.empty()) u0 = bsq::coefficients_from_json(bsq::read_json_file(rc.initial));

    bsq::InvertOptions io;
    io.tol = rc.tol;
    io.max_iter = rc.max_iter;
    io.threads = rc.threads;
    io.ode = ode_options(rc);
    try {
        const bsq::InvertResult res = bsq::invert_map(target, u0, io);
        write_json(out_path(rc, ".json"), {{"converged", true},
                                           {"coefficients", bsq::to_json(res.u)},
                                           {"iterations", res.iterations},
                                           {"residual_history", res.residual_history},
                                           {"condition_estimate", res.condition_estimate}});
    } catch (const bsq::NoConvergence& e) {
        json best = nullptr;
        if (!e.best_iterate.empty())
            best = bsq::to_json(bsq::unpack(e.best_iterate, static_cast<std::size_t>(target.n_max)));
        write_json(out_path(rc, ".json"), {{"converged", false},
                                           {"best", best},
                                           {"residual_history", e.residual_history},
                                           {"condition_estimate", e.condition_estimate}});
        throw;
    }
    return ok;
}

int cmd_flow(const RunConfig& rc) {
    const bsq::CoefficientPair u = bsq::coefficients_from_json(bsq::read_json_file(rc.input));
    const bsq::FlowState s0 = bsq::make_flow_state(u, rc.modes);
    bsq::FlowOptions fo;
    fo.scheme = rc.scheme == "rk4" ? bsq::TimeScheme::classical_rk4 : bsq::TimeScheme::integrating_factor_rk4;
    fo.snapshot_times = rc.snapshots;
    fo.blowup_threshold = rc.blowup_threshold;

    const std::vector<bsq::FlowState> traj = bsq::evolve(s0, rc.dt, rc.t_end, fo);
    std::ostringstream csv;
    bsq::write_flow_csv(csv, traj);
    bsq::write_text_file(out_path(rc, "_trajectory.csv"), csv.str());

    std::vector<double> times;
    for (const bsq::FlowState& s : traj) times.push_back(s.t);
    const bsq::DriftReport rep = bsq::isospectral_check(s0, times, rc.n_list, rc.dt, fo, rc.threads);
    write_json(out_path(rc, "_drift.json"), bsq::to_json(rep));
    std::cout << "max relative drift of r_n^+-: " << rep.max_relative_drift << '\n';
    return ok;
}

int exit_code_for(const bsq::Error& e) {
    const std::string& k = e.kind();
    if (k == "InputError" || k == "NonRealData") return parse_error;
    if (k == "CountMismatch") return count_mismatch;
    if (k == "NoConvergence") return no_convergence;
    if (k == "BlowUp") return blow_up;
    return other_error;
}

// Library warnings are held back so that an ERROR line, when there is one,
// is the first line on stderr.
class HeldWarnings {
public:
    HeldWarnings() : saved_(std::cerr.rdbuf(held_.rdbuf())) {}
    ~HeldWarnings() { release(); }

    void release() {
        if (!saved_) return;
        std::cerr.rdbuf(saved_);
        saved_ = nullptr;
        std::cerr << held_.str();
    }

private:
    std::ostringstream held_;
    std::streambuf* saved_;
};

HeldWarnings* held = nullptr;

int report(int code, const std::string& kind, const std::string& module, const std::string& message) {
    std::string text = "ERROR " + kind + ' ' + module + ": " + message;
    std::replace(text.begin(), text.end(), '\n', ' ');
    if (held) {
        // restore the real stream without flushing the held text yet
        HeldWarnings* h = held;
        held = nullptr;
        std::cout.flush();
        std::fputs((text + '\n').c_str(), stderr);
        h->release();
    } else {
        std::cerr << text << '\n';
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral data of the third-order Boussinesq operator"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string config_path;

    std::optional<int> n_max, ode_steps, max_iter, threads;
    std::optional<double> tol;
    std::optional<std::string> out;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"spectrum", "Branch points, 3-point eigenvalues and gap data (JSON) plus rho on the real axis (CSV)"},
        {"verify", "Run the identity suite and print a pass/fail table"},
        {"invert", "Recover coefficients from spectral data by Newton iteration"},
        {"flow", "Evolve the Boussinesq flow and track the branch points"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("input", rc.input, name == "invert" ? "Spectral data JSON" : "Coefficient JSON");
        sub->add_option("--config", config_path, "JSON config; flags override its values")->check(CLI::ExistingFile);
        sub->add_option("--n-max", n_max, "Largest |n|");
        sub->add_option("--ode-steps", ode_steps, "RK steps per unit length");
        sub->add_option("--tol", tol, "Newton residual tolerance (invert)");
        sub->add_option("--max-iter", max_iter, "Newton iteration limit (invert)");
        sub->add_option("--threads", threads, "Worker threads");
        sub->add_option("--out", out, "Output path prefix");
        sub->callback([&rc, name = name] { rc.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(parse_error, "InputError", "cli", e.what());
    }

    HeldWarnings warnings;
    held = &warnings;
    try {
        const std::string positional = rc.input;
        if (!config_path.empty()) apply_config_file(config_path, rc);
        if (!positional.empty()) rc.input = positional;
        if (n_max) rc.n_max = *n_max;
        if (ode_steps) rc.ode_steps = *ode_steps;
        if (tol) rc.tol = *tol;
        if (max_iter) rc.max_iter = *max_iter;
        if (threads) rc.threads = *threads;
        if (out) rc.out = *out;
        validate(rc);

        if (rc.command == "spectrum") return cmd_spectrum(rc);
        if (rc.command == "verify") return cmd_verify(rc);
        if (rc.command == "invert") return cmd_invert(rc);
        return cmd_flow(rc);
    } catch (const Failure& f) {
        return report(f.code, f.kind, f.module, f.message);
    } catch (const bsq::Error& e) {
        return report(exit_code_for(e), e.kind(), e.module(), e.what());
    } catch (const json::exception& e) {
        return report(parse_error, "InputError", "cli", e.what());
    } catch (const std::exception& e) {
        return report(other_error, "Error", "cli", e.what());
    }
}
