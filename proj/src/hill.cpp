#include "bsq/hill.hpp"

#include "bsq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsq {

namespace {

using std::numbers::pi;

struct FloquetInit {
    cplx tau;
    Vec3 init;
};

// Eigenvector of the one-period transition for tau, scaled to f(0) = 1.
FloquetInit floquet_init(const ThirdOrderOperator& op, cplx lambda) {
    const Monodromy3 m = monodromy3(op, lambda);
    const cplx tau = select_tau(m);
    const Mat3 A = m.M.transpose() - tau * Mat3::Identity();
    Vec3 best = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Vec3 c = A.row(i).transpose().cross(A.row(j).transpose());
            if (c.norm() > best.norm()) best = c;
        }
    if (std::abs(best(0)) <= 1e-14 * best.norm())
        throw PositivityFailure("Floquet solution vanishes at x = 0 for lambda = " + std::to_string(lambda.real()));
    return {tau, best / best(0)};
}

}  // namespace

FloquetSolution floquet_solution(const ThirdOrderOperator& op, cplx lambda) {
    const FloquetInit fi = floquet_init(op, lambda);
    FloquetSolution out{lambda, fi.tau, fi.init, {}};
    integrate_third_order(op, lambda, 1.0, fi.init, &out.trajectory);
    if (lambda.imag() == 0.0 && lambda.real() > 1.0) {
        for (const auto& pt : out.trajectory)
            if (!(pt.y(0).real() > 0.0))
                throw PositivityFailure("Floquet solution is not positive at x = " + std::to_string(pt.x));
    }
    return out;
}

FloquetSolution floquet_solution(const CoefficientPair& u, cplx lambda) {
    return floquet_solution(ThirdOrderOperator(u), lambda);
}

cplx lambda_of_energy(cplx E) {
    if (E.imag() == 0.0 && E.real() > 0.0) return std::pow(4.0 * E.real() / 3.0, 1.5);
    return std::pow(4.0 * E / 3.0, 1.5);
}

cplx energy_of_lambda(cplx lambda) {
    const cplx z = cube_root(lambda);
    return 0.75 * z * z;
}

EnergyPotential::EnergyPotential(const ThirdOrderOperator& op, double E)
    : op_(op), E_(E), f_(floquet_solution(op, lambda_of_energy(E))) {}

double EnergyPotential::operator()(double x) const {
    x -= std::floor(x);
    const Vec3 f = x == 0.0 ? f_.init : integrate_third_order(op_, f_.lambda, x, f_.init);
    const cplx w = f(1) / f(0), s = f(2) / f(0);
    return (E_ - 2.0 * op_.coefficients().p(x) - 1.5 * s + 0.75 * w * w).real();
}

FloquetPotential EnergyPotential::hill_potential() const { return {op_, f_.lambda, f_.w0(), f_.s0()}; }

EnergyPotential potential_V(const ThirdOrderOperator& op, double E) { return EnergyPotential(op, E); }

double omega_lo(int n) { return (pi * n - 1.0) * (pi * n - 1.0); }
double omega_hi(int n) { return (pi * n + 1.0) * (pi * n + 1.0); }

Monodromy2 hill_monodromy(const ThirdOrderOperator& op, double E) {
    const cplx lambda = lambda_of_energy(E);
    const FloquetInit fi = floquet_init(op, lambda);
    return monodromy2(FloquetPotential{op, lambda, fi.init(1), fi.init(2)}, E);
}

namespace {

// Gap pair and Dirichlet point in (lo, hi) for a Hill equation whose
// one-period data at E is produced by `mono`.
// `mono` maps complex E to one-period data; with `analytic` set, the
// derivatives are taken by complex step, otherwise by central differences
// (the energy-dependent potential is only evaluated for real E).
template <class Mono>
HillSpectra hill_in_window(Mono&& mono, int n, double lo, double hi, const HillOptions& opts, bool analytic) {
    const double sgn = n % 2 == 0 ? 1.0 : -1.0;
    auto f = [&](double E) {
        const Monodromy2 m = mono(E);
        return Sample{sgn * m.discriminant().real() - 1.0,
                      1.0 + 0.5 * (std::abs(m.theta) + std::abs(m.phi_prime))};
    };
    auto slope = [&](auto&& part) {
        return [&, part](double E) {
            if (analytic) {
                constexpr double h = 1e-30;
                return part(mono(cplx(E, h))).imag() / h;
            }
            const double h = 1e-7 * std::abs(E);
            return (part(mono(E + h)) - part(mono(E - h))).real() / (2.0 * h);
        };
    };
    auto delta_part = [sgn](const Monodromy2& m) { return sgn * m.discriminant(); };
    auto phi_part = [](const Monodromy2& m) { return m.phi; };

    PairSearch search;
    search.panels = opts.panels;
    search.closed_tol = opts.closed_tol;
    search.module = "hill_side";
    const std::string what = "Delta^2 = 1 in Omega_" + std::to_string(n);
    search.what = what.c_str();
    const PairLocation loc = locate_zero_pair(f, slope(delta_part), lo, hi, search);

    auto phi = [&](double E) { return mono(E).phi.real(); };
    double gm;
    try {
        gm = locate_single_zero(phi, slope(phi_part), lo, hi, opts.panels, "hill_side");
    } catch (const CountMismatch& e) {
        throw CountMismatch(std::string(e.what()) + " (phi(1, E) in Omega_" + std::to_string(n) + ")", "hill_side");
    }
    return {n, loc.lower, loc.upper, loc.closed, gm, mono(gm).phi_prime.real()};
}

}  // namespace

HillSpectra hill_spectra(const ThirdOrderOperator& op, int n, const HillOptions& opts) {
    if (n < 1) throw InputError("Hill spectra are indexed by n >= 1", "hill_side");
    return hill_in_window([&](cplx E) { return hill_monodromy(op, E.real()); }, n, omega_lo(n), omega_hi(n), opts,
                          false);
}

HillSpectra hill_spectra(const CoefficientPair& u, int n, const HillOptions& opts) {
    return hill_spectra(ThirdOrderOperator(u), n, opts);
}

double dead_zone_sign(double h) {
    if (std::abs(h) < 1e-10) return 0.0;
    return h > 0.0 ? 1.0 : -1.0;
}

std::vector<KorotyaevPsi> korotyaev_psi(const TrigSeries& v, int n_max, const HillOptions& opts) {
    if (n_max < 1) throw InputError("n_max must be at least 1", "hill_side");
    const HillPotential V = StaticPotential(v);
    std::vector<KorotyaevPsi> out;
    for (int n = 1; n <= n_max; ++n) {
        const HillSpectra s =
            hill_in_window([&](cplx E) { return monodromy2(V, E); }, n, omega_lo(n), omega_hi(n), opts, true);
        KorotyaevPsi k;
        k.n = n;
        k.lambda_minus = s.E_minus;
        k.lambda_plus = s.E_plus;
        k.dirichlet = s.gm;
        k.psi_cn = 0.5 * (s.E_plus + s.E_minus) - s.gm;
        k.h_sn = std::log(std::abs(s.phi1_prime));
        const double half_gap = 0.5 * (s.E_plus - s.E_minus);
        k.psi_sn = std::sqrt(std::abs(half_gap * half_gap - k.psi_cn * k.psi_cn)) * dead_zone_sign(k.h_sn);
        out.push_back(k);
    }
    return out;
}

McKeanCheck mckean_check(const ThirdOrderOperator& op, double E, const Vec3& y0, int points) {
    const FloquetSolution fs = floquet_solution(op, lambda_of_energy(E));
    // U does not change when a multiple of f is added to y. Removing the
    // f-component (via the left eigenvector for tau) keeps y' - (f'/f) y
    // from cancelling between exponentially growing terms.
    const Mat3 A = monodromy3(op, fs.lambda).M - fs.tau * Mat3::Identity();
    Vec3 left = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Vec3 c = A.row(i).transpose().cross(A.row(j).transpose());
            if (c.norm() > left.norm()) left = c;
        }
    const cplx coeff = left.transpose() * y0;
    const cplx norm = left.transpose() * fs.init;
    const Vec3 y_rec = y0 - (coeff / norm) * fs.init;
    Trajectory ty;
    integrate_third_order(op, fs.lambda, 1.0, y_rec, &ty);
    const Trajectory& tf = fs.trajectory;
    const int S = static_cast<int>(tf.size()) - 1;
    const double h = 1.0 / S;
    const TrigSeries& p = op.coefficients().p;

    auto U = [&](int j) {
        const Vec3& f = tf[j].y;
        const Vec3& y = ty[j].y;
        return std::sqrt(f(0)) * (y(1) - f(1) / f(0) * y(0));
    };

    McKeanCheck out;
    out.max_abs_V = 0.0;
    double umax = 0.0, rmax = 0.0;
    for (int k = 0; k < points; ++k) {
        const int j = std::clamp(static_cast<int>(std::lround((k + 0.5) / points * S)), 3, S - 3);
        const cplx u2 = (2.0 * U(j - 3) - 27.0 * U(j - 2) + 270.0 * U(j - 1) - 490.0 * U(j) + 270.0 * U(j + 1) -
                         27.0 * U(j + 2) + 2.0 * U(j + 3)) /
                        (180.0 * h * h);
        const Vec3& f = tf[j].y;
        const cplx w = f(1) / f(0), s = f(2) / f(0);
        const cplx VmE = -2.0 * p(tf[j].x) - 1.5 * s + 0.75 * w * w;
        const cplx Uj = U(j);
        out.x.push_back(tf[j].x);
        out.U.push_back(Uj);
        out.residual.push_back(-u2 + VmE * Uj);
        out.max_abs_V = std::max(out.max_abs_V, std::abs(E + VmE));
        umax = std::max(umax, std::abs(Uj));
        rmax = std::max(rmax, std::abs(out.residual.back()));
    }
    out.relative_residual = rmax / (umax * std::max(1.0, E));
    return out;
}

}  // namespace bsq
