#pragma once

#include "bsq/ode.hpp"
#include "bsq/roots.hpp"

#include <array>
#include <optional>
#include <ostream>

namespace bsq {

/// Principal cube root with arg in (-pi/3, pi/3].
cplx cube_root(cplx lambda);

/// D_n = { |lambda^{1/3} - 2 pi n / sqrt 3| < 2 / sqrt 3 } for n >= 0 and
/// D_{-n} = -D_n.
struct SpectralDomain {
    int n;

    /// Center (2 pi n / sqrt 3)^3, with the sign of n.
    double center() const;
    /// Intersection with the real axis.
    double real_lo() const;
    double real_hi() const;
    /// Boundary point at angle theta (counter-clockwise).
    cplx boundary(double theta) const;
    bool contains(cplx lambda) const;
};

struct DiscriminantValue {
    cplx lambda;
    cplx rho;
    cplx c2;  // tr M
    cplx c1;  // sum of principal 2x2 minors of M
    /// Sum of the magnitudes of the terms of the discriminant polynomial;
    /// the round-off floor of rho is a small multiple of eps * scale.
    double scale;
};

/// Discriminant of t^3 - c2 t^2 + c1 t - 1 (the characteristic polynomial
/// of M, whose constant term is det M = 1):
///     rho = c2^2 c1^2 - 4 c1^3 - 4 c2^3 + 18 c2 c1 - 27.
DiscriminantValue discriminant(const Monodromy3& m);
DiscriminantValue discriminant(const ThirdOrderOperator& op, cplx lambda);
DiscriminantValue discriminant(const CoefficientPair& u, cplx lambda);

/// d rho / d lambda at real lambda by complex-step differentiation.
double discriminant_slope(const ThirdOrderOperator& op, double lambda);

/// (tau_2 - tau_3)^2 for the two multipliers other than the dominant one,
/// valid for real lambda > 1 (where tau_1 ~ e^{lambda^{1/3}} dominates).
/// Same zeros and sign as rho there, but assembled from tau_1 and the
/// minor trace, so it keeps full relative accuracy when tau_2, tau_3 are
/// exponentially smaller than tau_1 (where tr M has lost them).
Sample collision_factor(const Monodromy3& m);
cplx collision_factor_value(const ThirdOrderOperator& op, cplx lambda);

/// The three roots of the characteristic cubic, Newton-polished.
std::array<cplx, 3> floquet_multipliers(const Monodromy3& m);

/// Distinguished multiplier tau(lambda) ~ exp(lambda^{1/3}) on
/// { |lambda| > 1, |arg lambda| < 3 pi / 4 }.
cplx select_tau(const Monodromy3& m);
cplx select_tau(const ThirdOrderOperator& op, cplx lambda);
cplx select_tau(const CoefficientPair& u, cplx lambda);
bool in_tau_domain(cplx lambda);

struct BranchPoints {
    int n;
    double r_minus;
    double r_plus;
    bool closed;
    /// Maximizer between the two zeros of the function searched (rho, or
    /// the collision factor for n > 0) and its value there.
    double peak;
    double peak_value;
    double peak_scale;
    /// Argument-principle count of zeros of rho in D_n (NaN when skipped).
    double contour_count;
};

struct LocateOptions {
    bool verify_count = true;
    int contour_points = 512;
    int panels = 64;
    double closed_tol = 1e-13;
    /// Relative gap width below which the pair is flagged closed.
    double closed_width = 1e-6;
    /// Previous result for the same n, used as a starting guess.
    std::optional<BranchPoints> hint;
};

/// The two real zeros r_n^- <= r_n^+ of rho in D_n.
BranchPoints locate_branch_points(const ThirdOrderOperator& op, int n, const LocateOptions& opts = {});
BranchPoints locate_branch_points(const CoefficientPair& u, int n, const LocateOptions& opts = {});
/// The pair r_0^+- in D_0 (diagnostic only).
BranchPoints locate_r0(const ThirdOrderOperator& op, const LocateOptions& opts = {});
BranchPoints locate_r0(const CoefficientPair& u, const LocateOptions& opts = {});

/// Argument-principle count of zeros of an analytic function inside D_n.
double count_zeros_in_domain(const std::function<cplx(cplx)>& f, const SpectralDomain& D, int points);
double count_rho_zeros(const ThirdOrderOperator& op, int n, int points = 512);

/// CSV of rho on [lo, hi]: lambda, rho, rho/scale.
void write_rho_csv(std::ostream& out, const ThirdOrderOperator& op, double lo, double hi, int points);

}  // namespace bsq
