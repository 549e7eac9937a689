#include "bsq/verify.hpp"

#include "bsq/errors.hpp"
#include "bsq/floquet.hpp"
#include "bsq/hill.hpp"
#include "bsq/parallel.hpp"
#include "bsq/three_point.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

namespace bsq {

bool VerifyReport::all_passed() const { return first_failure() == nullptr; }

const IdentityCheck* VerifyReport::first_failure() const {
    for (const IdentityCheck& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

namespace {

// Running maximum of an error over indices, remembering where it occurred.
struct Worst {
    double error = 0.0;
    std::string where;

    void add(double e, const std::string& at) {
        if (std::isnan(error)) return;  // a NaN stays reported
        if (std::isnan(e) || e > error) {
            error = e;
            where = at;
        }
    }
};

IdentityCheck make_check(std::string name, const Worst& w, double tol) {
    IdentityCheck c;
    c.name = std::move(name);
    c.error = w.error;
    c.tolerance = tol;
    c.passed = w.error <= tol;
    c.detail = w.where;
    return c;
}

std::vector<int> signed_indices(int n_max) {
    std::vector<int> ns;
    for (int n = 1; n <= n_max; ++n) {
        ns.push_back(n);
        ns.push_back(-n);
    }
    return ns;
}

std::string at_n(int n) { return "n=" + std::to_string(n); }

double scaled(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }
double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

VerifyReport verify_identities(const CoefficientPair& u, const VerifyOptions& opts) {
    if (opts.n_max < 1) throw InputError("verify needs n_max >= 1", "cli");
    if (opts.hill_n_max < 0 || opts.hill_n_max > opts.n_max)
        throw InputError("hill_n_max must lie in [0, n_max]", "cli");
    check_ball(u, "verify");

    const std::vector<int> ns = signed_indices(opts.n_max);
    const ThirdOrderOperator op(u, opts.ode);
    const ThirdOrderOperator op_r(u.reflect(), opts.ode);
    const ThirdOrderOperator op_s(u.star(), opts.ode);
    const ThirdOrderOperator op_sr(u.star_reflect(), opts.ode);
    VerifyReport rep;

    // det M = 1 on a spiral of complex lambda with |lambda| <= det_radius.
    {
        std::vector<double> err(opts.det_points);
        parallel_for(err.size(), opts.threads, [&](std::size_t k) {
            const double r = opts.det_radius * (k + 1.0) / opts.det_points;
            const double theta = 2.0 * std::numbers::pi * std::fmod(k * std::numbers::phi, 1.0);
            err[k] = std::abs(monodromy3(op, std::polar(r, theta)).det() - 1.0);
        });
        Worst w;
        for (std::size_t k = 0; k < err.size(); ++k) w.add(err[k], "point " + std::to_string(k));
        rep.checks.push_back(make_check("det M = 1", w, opts.det_tol));
    }

    // Branch points and 3-point eigenvalues of u and its three images.
    struct Row {
        BranchPoints r, r_ref, r_star, r_star_ref;
        ThreePointEigen mu, mu_star_ref;
        double f_count = 0.0;
    };
    std::vector<Row> rows(ns.size());
    BranchPoints r0;
    parallel_for(ns.size() + 1, opts.threads, [&](std::size_t i) {
        LocateOptions with;
        with.contour_points = opts.contour_points;
        with.verify_count = false;  // counted below so a mismatch is reported, not thrown
        if (i == ns.size()) {
            r0 = locate_r0(op, with);
            r0.contour_count = count_rho_zeros(op, 0, opts.contour_points);
            return;
        }
        const int n = ns[i];
        Row& row = rows[i];
        row.r = locate_branch_points(op, n, with);
        row.r.contour_count = count_rho_zeros(op, n, opts.contour_points);
        row.r_ref = locate_branch_points(op_r, n, with);
        row.r_star = locate_branch_points(op_s, -n, with);
        row.r_star_ref = locate_branch_points(op_sr, -n, with);
        MuOptions mo;
        mo.verify_count = false;
        row.mu = locate_mu(op, n, mo);
        row.mu_star_ref = locate_mu(op_sr, -n, mo);
        row.f_count = count_three_point_zeros(op, n, opts.contour_points);
    });

    {
        Worst rho, f;
        rho.add(std::abs(r0.contour_count - 2.0), "n=0");
        for (std::size_t i = 0; i < ns.size(); ++i) {
            rho.add(std::abs(rows[i].r.contour_count - 2.0), at_n(ns[i]));
            f.add(std::abs(rows[i].f_count - 1.0), at_n(ns[i]));
        }
        rep.checks.push_back(make_check("rho has 2 zeros in each D_n", rho, 0.1));
        rep.checks.push_back(make_check("F has 1 zero in each D_n", f, 0.1));
    }
    {
        Worst w;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const Row& row = rows[i];
            const double out = std::max({row.r.r_minus - row.mu.mu, row.mu.mu - row.r.r_plus, 0.0});
            w.add(out / std::max(1.0, std::abs(row.mu.mu)), at_n(ns[i]));
        }
        rep.checks.push_back(make_check("mu_n in [r_n^-, r_n^+]", w, opts.containment_slack));
    }
    {
        Worst reflect, star, star_reflect, star_pair, mu;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const Row& row = rows[i];
            const std::string at = at_n(ns[i]);
            for (int pm = 0; pm < 2; ++pm) {
                const double r = pm ? row.r.r_plus : row.r.r_minus;
                const double rr = pm ? row.r_ref.r_plus : row.r_ref.r_minus;
                const double rs = pm ? -row.r_star.r_minus : -row.r_star.r_plus;
                const double rsr = pm ? -row.r_star_ref.r_minus : -row.r_star_ref.r_plus;
                reflect.add(scaled(rr, r), at);
                star.add(scaled(rs, r), at);
                star_reflect.add(scaled(rsr, r), at);
                star_pair.add(scaled(rsr, rs), at);
            }
            // mu_{-n}(u) = -mu_n(u*^-) is checked as mu_n(u) = -mu_{-n}(u*^-).
            mu.add(scaled(-row.mu_star_ref.mu, row.mu.mu), at);
        }
        rep.checks.push_back(make_check("r_n(u) = r_n(u^-)", reflect, opts.symmetry_tol));
        rep.checks.push_back(make_check("r_n^+-(u) = -r_-n^-+(u*)", star, opts.symmetry_tol));
        rep.checks.push_back(make_check("r_n^+-(u) = -r_-n^-+(u*^-)", star_reflect, opts.symmetry_tol));
        rep.checks.push_back(make_check("r_-n(u*) = r_-n(u*^-)", star_pair, opts.symmetry_tol));
        rep.checks.push_back(make_check("mu_-n(u) = -mu_n(u*^-)", mu, opts.symmetry_tol));
    }

    if (opts.hill_n_max > 0) {
        struct HillRow {
            HillSpectra hs;
            ThreePointEigen mu_star;
            double tau = 0.0;
        };
        std::vector<HillRow> hill(opts.hill_n_max);
        parallel_for(hill.size(), opts.threads, [&](std::size_t i) {
            const int n = static_cast<int>(i) + 1;
            hill[i].hs = hill_spectra(op, n);
            MuOptions mo;
            mo.verify_count = false;
            hill[i].mu_star = locate_mu(op_s, -n, mo);
            hill[i].tau = select_tau(op, -hill[i].mu_star.mu).real();
        });
        Worst edges, dirichlet, slope;
        for (int n = 1; n <= opts.hill_n_max; ++n) {
            const HillRow& h = hill[n - 1];
            const Row& row = rows[2 * (n - 1)];
            const std::string at = at_n(n);
            edges.add(relative(h.hs.E_minus, 0.75 * std::cbrt(row.r.r_minus) * std::cbrt(row.r.r_minus)), at);
            edges.add(relative(h.hs.E_plus, 0.75 * std::cbrt(row.r.r_plus) * std::cbrt(row.r.r_plus)), at);
            const double m = std::cbrt(-h.mu_star.mu);
            dirichlet.add(relative(h.hs.gm, 0.75 * m * m), at);
            slope.add(relative(h.hs.phi1_prime, h.mu_star.y1_prime / std::sqrt(h.tau)), at);
        }
        rep.checks.push_back(make_check("E_n^+- = (3/4)(r_n^+-)^(2/3)", edges, opts.hill_tol));
        rep.checks.push_back(make_check("Dirichlet E_n = (3/4)(-mu_-n(u*))^(2/3)", dirichlet, opts.hill_tol));
        rep.checks.push_back(make_check("phi'(1) = y'_-n(1,u*) tau^(-1/2)", slope, opts.hill_tol));
    }
    return rep;
}

void print_verify_table(std::ostream& out, const VerifyReport& report) {
    char line[256];
    for (const IdentityCheck& c : report.checks) {
        std::snprintf(line, sizeof line, "%-4s %-42s error=%.3e tol=%.1e %s\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.error, c.tolerance, c.detail.c_str());
        out << line;
    }
}

nlohmann::json to_json(const VerifyReport& report) {
    nlohmann::json arr = nlohmann::json::array();
    for (const IdentityCheck& c : report.checks)
        arr.push_back({{"name", c.name}, {"error", c.error}, {"tolerance", c.tolerance}, {"passed", c.passed}, {"at", c.detail}});
    return {{"checks", arr}, {"all_passed", report.all_passed()}};
}

}  // namespace bsq
