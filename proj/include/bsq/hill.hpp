#pragma once

#include "bsq/floquet.hpp"

#include <vector>

namespace bsq {

/// The solution f of the third-order equation with f(x + 1) = tau f(x)
/// and f(0) = 1.
struct FloquetSolution {
    cplx lambda;
    cplx tau;
    /// (f(0), f'(0), f''(0)) with f(0) = 1.
    Vec3 init;
    /// Node values of (f, f', f'') on [0, 1].
    Trajectory trajectory;

    /// f'/f and f''/f at x = 0.
    cplx w0() const { return init(1); }
    cplx s0() const { return init(2); }
};

/// Builds the Floquet solution at lambda. For real lambda > 1 the solution
/// must stay positive on [0, 1] (PositivityFailure otherwise).
FloquetSolution floquet_solution(const ThirdOrderOperator& op, cplx lambda);
FloquetSolution floquet_solution(const CoefficientPair& u, cplx lambda);

/// lambda = (4E/3)^{3/2} on the positive branch.
cplx lambda_of_energy(cplx E);
/// E = (3/4) lambda^{2/3}.
cplx energy_of_lambda(cplx lambda);

/// The energy-dependent potential x -> V(x, E) generated by the Floquet
/// solution at lambda(E).
class EnergyPotential {
public:
    EnergyPotential(const ThirdOrderOperator& op, double E);

    double E() const noexcept { return E_; }
    const FloquetSolution& floquet() const noexcept { return f_; }
    /// V(x, E); x is reduced to [0, 1).
    double operator()(double x) const;
    FloquetPotential hill_potential() const;

private:
    ThirdOrderOperator op_;
    double E_;
    FloquetSolution f_;
};

EnergyPotential potential_V(const ThirdOrderOperator& op, double E);

/// Omega_n = { |sqrt E - pi n| < 1 } on the real axis.
double omega_lo(int n);
double omega_hi(int n);

/// Hill-side spectral data in Omega_n for the energy-dependent potential.
struct HillSpectra {
    int n;
    double E_minus;
    double E_plus;
    bool closed;
    /// Dirichlet eigenvalue (zero of phi(1, E)) and phi'(1) there.
    double gm;
    double phi1_prime;
};

struct HillOptions {
    int panels = 64;
    double closed_tol = 1e-13;
};

/// Lyapunov function Delta(E) = (theta(1) + phi'(1)) / 2 of -u'' + V(x, E) u = E u.
Monodromy2 hill_monodromy(const ThirdOrderOperator& op, double E);

HillSpectra hill_spectra(const ThirdOrderOperator& op, int n, const HillOptions& opts = {});
HillSpectra hill_spectra(const CoefficientPair& u, int n, const HillOptions& opts = {});

/// Gap coordinates (psi_c, psi_s) of a plain Hill operator -u'' + v u.
struct KorotyaevPsi {
    int n;
    double psi_cn;
    double psi_sn;
    double lambda_minus;
    double lambda_plus;
    double dirichlet;
    double h_sn;
};

std::vector<KorotyaevPsi> korotyaev_psi(const TrigSeries& v, int n_max, const HillOptions& opts = {});

/// sign(h) with a dead zone |h| < 1e-10 mapped to 0.
double dead_zone_sign(double h);

/// Applies U = f^{3/2} (y/f)' = f^{1/2}(y' - (f'/f) y) to the third-order
/// solution with initial state y0 at lambda(E), and evaluates
/// -U'' + V U - E U at 64 points (k + 1/2)/64, with U'' from a 6th-order
/// finite-difference stencil on the integration grid.
struct McKeanCheck {
    std::vector<double> x;
    std::vector<cplx> U;
    std::vector<cplx> residual;
    /// max |residual| / (max |U| * max(1, E)).
    double relative_residual;
    /// max |V(x, E)| over the same points.
    double max_abs_V;
};

McKeanCheck mckean_check(const ThirdOrderOperator& op, double E, const Vec3& y0, int points = 64);

}  // namespace bsq
