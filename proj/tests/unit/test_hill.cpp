#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsq/errors.hpp"
#include "bsq/hill.hpp"
#include "bsq/three_point.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace bsq;
using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

// Hill's method: eigenvalues of -u'' + v u with u = sum c_k e^{i pi k x},
// k of fixed parity (even: periodic, odd: antiperiodic), truncated at |k| <= K.
std::vector<double> hill_matrix_eigs(const TrigSeries& v, bool periodic, int K = 60) {
    std::vector<int> ks;
    for (int k = -K; k <= K; ++k)
        if ((std::abs(k) % 2 == 0) == periodic) ks.push_back(k);
    const int n = static_cast<int>(ks.size());
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = (ks[i] - ks[j]) / 2;  // harmonic of v coupling the modes
            if (i == j) H(i, j) = pi * pi * ks[i] * ks[i];
            else if (std::abs(d) <= static_cast<int>(v.order()))
                H(i, j) = 0.5 * cplx(v.a(std::abs(d)), d > 0 ? -v.b(d) : v.b(-d));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

}  // namespace

TEST_CASE("energy and spectral parameter are inverse") {
    for (double E : {1.5, 10.0, 300.0}) {
        CHECK(std::abs(energy_of_lambda(lambda_of_energy(E)) - E) < 1e-12 * E);
        CHECK(std::abs(lambda_of_energy(E) - std::pow(4 * E / 3, 1.5)) < 1e-12 * std::pow(4 * E / 3, 1.5));
    }
}

TEST_CASE("free field generates a vanishing potential") {
    const ThirdOrderOperator op(CoefficientPair{TrigSeries(1), TrigSeries(1)});
    for (double E : {5.0, 20.0, 100.0}) {
        const EnergyPotential V(op, E);
        for (int k = 0; k < 64; ++k) CHECK(std::abs(V((k + 0.5) / 64)) < 1e-8);
    }
}

// Linear response: f = e^{tau x}(1 + g) with tau^3 = lambda. For p = eps cos(kx),
// g solves g''' + 3 tau g'' + 3 tau^2 g' = -(2 tau p + p') and V = -2p - 1.5 (tau g' + g'').
static double linear_V(double eps, double k, double tau, double x) {
    const cplx ik(0.0, k);
    const cplx G = -eps * (2.0 * tau + ik) / (ik * ik * ik + 3.0 * tau * ik * ik + 3.0 * tau * tau * ik);
    return -2.0 * eps * std::cos(k * x) - 1.5 * (G * (ik * tau + ik * ik) * std::exp(ik * x)).real();
}

TEST_CASE("weak potential matches the linear response") {
    const double E = pi * pi, tau = std::sqrt(4 * E / 3);
    double dev[2];
    for (int i = 0; i < 2; ++i) {
        const double eps = i == 0 ? 0.01 : 0.005;
        const CoefficientPair u{TrigSeries::cosine(1, eps), TrigSeries(1)};
        const EnergyPotential V(ThirdOrderOperator(u), E);
        dev[i] = 0.0;
        for (int k = 0; k < 64; ++k) {
            const double x = (k + 0.5) / 64;
            dev[i] = std::max(dev[i], std::abs(V(x) - linear_V(eps, 2 * pi, tau, x)));
        }
    }
    CHECK(dev[0] < 1e-3);
    // the remainder is quadratic in the amplitude
    CHECK(dev[0] / dev[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("Floquet solution is positive and its log-derivatives are periodic") {
    const ThirdOrderOperator op(test::random_pair(51, 3, 0.05));
    const FloquetSolution f = floquet_solution(op, 80.0);
    CHECK(f.init(0) == cplx(1.0));
    CHECK(f.tau.real() > 0.0);
    for (const TrajectoryPoint& pt : f.trajectory) CHECK(pt.y(0).real() > 0.0);
    const FloquetPotential V{op, 80.0, f.w0(), f.s0()};
    const auto ws = riccati_period_map(V);
    CHECK(std::abs(ws[0] - f.w0()) < 1e-8 * std::abs(f.w0()));
    CHECK(std::abs(ws[1] - f.s0()) < 1e-8 * std::abs(f.s0()));
}

TEST_CASE("free Hill spectra") {
    const ThirdOrderOperator op(CoefficientPair{TrigSeries(1), TrigSeries(1)});
    const HillSpectra h = hill_spectra(op, 2);
    // closed gap: a double root of Delta^2 - 1, resolved to about sqrt(eps)
    CHECK(h.closed);
    CHECK(h.E_minus == doctest::Approx(4 * pi * pi).epsilon(1e-8));
    CHECK(h.E_plus == doctest::Approx(4 * pi * pi).epsilon(1e-8));
    CHECK(h.gm == doctest::Approx(4 * pi * pi).epsilon(1e-10));
    CHECK(std::abs(omega_lo(2) - (2 * pi - 1) * (2 * pi - 1)) < 1e-12);
}

TEST_CASE("Hill side agrees with the third-order side") {
    const CoefficientPair u = test::random_pair(52, 3, 0.04);
    const ThirdOrderOperator op(u), op_star(u.star());
    const HillSpectra h = hill_spectra(op, 1);
    const BranchPoints r = locate_branch_points(op, 1);
    auto e_of = [](double l) { return 0.75 * std::cbrt(l) * std::cbrt(l); };
    CHECK(h.E_minus == doctest::Approx(e_of(r.r_minus)).epsilon(1e-6));
    CHECK(h.E_plus == doctest::Approx(e_of(r.r_plus)).epsilon(1e-6));
    const ThreePointEigen ms = locate_mu(op_star, -1);
    CHECK(h.gm == doctest::Approx(e_of(-ms.mu)).epsilon(1e-6));
    const cplx tau = select_tau(op, -ms.mu);
    CHECK(tau.real() > 0.0);
    CHECK(h.phi1_prime == doctest::Approx(ms.y1_prime / std::sqrt(tau.real())).epsilon(1e-6));
    CHECK(h.gm >= h.E_minus - 1e-9 * h.gm);
    CHECK(h.gm <= h.E_plus + 1e-9 * h.gm);
}

TEST_CASE("McKean transform solves the energy-dependent Hill equation") {
    const ThirdOrderOperator op(test::random_pair(53, 3, 0.05));
    const McKeanCheck mc = mckean_check(op, 30.0, Vec3(1.0, 0.3, -0.2));
    CHECK(mc.x.size() == 64);
    CHECK(mc.relative_residual < 1e-6);
    const McKeanCheck free = mckean_check(ThirdOrderOperator({TrigSeries(1), TrigSeries(1)}), 20.0, Vec3(0.0, 1.0, 0.0));
    CHECK(free.max_abs_V < 1e-8);
}

TEST_CASE("gap coordinates of a plain Hill operator") {
    for (const KorotyaevPsi& k : korotyaev_psi(TrigSeries(2), 3)) {
        CHECK(std::abs(k.psi_cn) < 1e-10);
        CHECK(std::abs(k.psi_sn) < 1e-10);
    }

    // gap edges against Hill's method
    const TrigSeries v({0.2, 0.0}, {0.0, 0.15});
    const auto anti = hill_matrix_eigs(v, false), peri = hill_matrix_eigs(v, true);
    const auto psi = korotyaev_psi(v, 2);
    CHECK(psi[0].lambda_minus == doctest::Approx(anti[0]).epsilon(1e-9));
    CHECK(psi[0].lambda_plus == doctest::Approx(anti[1]).epsilon(1e-9));
    CHECK(psi[1].lambda_minus == doctest::Approx(peri[1]).epsilon(1e-9));
    CHECK(psi[1].lambda_plus == doctest::Approx(peri[2]).epsilon(1e-9));

    // Dirichlet point inside the gap: psi lies on the circle of radius gap/2
    for (const KorotyaevPsi& k : psi) {
        REQUIRE(k.dirichlet > k.lambda_minus);
        REQUIRE(k.dirichlet < k.lambda_plus);
        CHECK(std::hypot(k.psi_cn, k.psi_sn) == doctest::Approx(0.5 * (k.lambda_plus - k.lambda_minus)).epsilon(1e-8));
    }

    // reflection v(x) -> v(-x) flips the sign of psi_s
    const TrigSeries w({0.2, 0.0}, {0.0, -0.15});
    const auto psi_w = korotyaev_psi(w, 2);
    for (int n = 0; n < 2; ++n) {
        CHECK(psi_w[n].psi_cn == doctest::Approx(psi[n].psi_cn).epsilon(1e-9));
        // psi_s comes out of a cancelling square root, so compare on the gap scale
        CHECK(std::abs(psi_w[n].psi_sn + psi[n].psi_sn) < 1e-7 * (psi[n].lambda_plus - psi[n].lambda_minus));
    }
}

TEST_CASE("dead-zone sign") {
    CHECK(dead_zone_sign(1e-3) == 1.0);
    CHECK(dead_zone_sign(-1e-3) == -1.0);
    CHECK(dead_zone_sign(1e-12) == 0.0);
}
