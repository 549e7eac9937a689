#pragma once

#include "bsq/floquet.hpp"

#include <optional>

namespace bsq {

/// Eigenvalue of the problem y(0) = y(1) = y(2) = 0 for the third-order
/// operator on [0, 2], with the eigenfunction normalized by y'(0) = 1.
struct ThreePointEigen {
    int n;
    double mu;
    /// y'(1) of the normalized eigenfunction.
    double y1_prime;
    /// y''(0) of the normalized eigenfunction (the phi_3 coefficient).
    double y0_second;
    /// Argument-principle count of zeros of F in D_n (NaN when skipped).
    double contour_count;
};

/// F(lambda) = phi_2(1) phi_3(2) - phi_3(1) phi_2(2).
cplx three_point_determinant(const ThirdOrderOperator& op, cplx lambda);
cplx three_point_determinant(const CoefficientPair& u, cplx lambda);

/// Sum of the magnitudes of the two products forming F; the round-off
/// floor of F is a small multiple of eps times this.
double three_point_scale(const Monodromy3& m);

struct MuOptions {
    bool verify_count = true;
    int contour_points = 512;
    int panels = 64;
    /// Previous eigenvalue for the same n, used as a starting guess.
    std::optional<double> hint;
};

ThreePointEigen locate_mu(const ThirdOrderOperator& op, int n, const MuOptions& opts = {});
ThreePointEigen locate_mu(const CoefficientPair& u, int n, const MuOptions& opts = {});

double count_three_point_zeros(const ThirdOrderOperator& op, int n, int points = 512);

}  // namespace bsq
