#pragma once

#include "bsq/ode.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace bsq::test {

/// Random coefficient pair with harmonics 1..order and ball_norm equal to
/// `norm`, drawn from a fixed seed.
inline CoefficientPair random_pair(unsigned seed, std::size_t order, double norm) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> pc(order), ps(order), qc(order), qs(order);
    for (std::size_t k = 0; k < order; ++k) {
        // Decay with the harmonic so p' and q carry comparable weight.
        const double w = 1.0 / (k + 1.0);
        pc[k] = U(rng) * w / (2.0 * std::numbers::pi * (k + 1));
        ps[k] = U(rng) * w / (2.0 * std::numbers::pi * (k + 1));
        qc[k] = U(rng) * w;
        qs[k] = U(rng) * w;
    }
    CoefficientPair u{TrigSeries(pc, ps), TrigSeries(qc, qs)};
    const double s = norm / ball_norm(u);
    return {s * u.p, s * u.q};
}

/// Free-field fundamental matrix from the exponential basis e^{z_m x},
/// z_m^3 = lambda: returns (phi_j^{(k)}(x)) with rows j.
inline Eigen::Matrix3cd free_fundamental(std::complex<double> lambda, double x) {
    using cplx = std::complex<double>;
    const cplx root = std::pow(lambda, 1.0 / 3.0);
    Eigen::Vector3cd z;
    for (int m = 0; m < 3; ++m) z(m) = root * std::polar(1.0, 2.0 * std::numbers::pi * m / 3.0);
    Eigen::Matrix3cd V;  // V(k, m) = z_m^k
    for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) V(k, m) = std::pow(z(m), k);
    const Eigen::Matrix3cd C = V.inverse();  // column j: coefficients of phi_j
    Eigen::Matrix3cd out;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            cplx s = 0.0;
            for (int m = 0; m < 3; ++m) s += C(m, j) * std::pow(z(m), k) * std::exp(z(m) * x);
            out(j, k) = s;
        }
    return out;
}

inline double free_center(int n) {
    const double c = 2.0 * std::numbers::pi * std::abs(n) / std::sqrt(3.0);
    return n < 0 ? -c * c * c : c * c * c;
}

}  // namespace bsq::test
