#include "bsq/three_point.hpp"

#include "bsq/errors.hpp"

#include <cmath>
#include <limits>

namespace bsq {

cplx three_point_determinant(const ThirdOrderOperator& op, cplx lambda) {
    return monodromy3(op, lambda).three_point_det();
}

cplx three_point_determinant(const CoefficientPair& u, cplx lambda) {
    return three_point_determinant(ThirdOrderOperator(u), lambda);
}

double three_point_scale(const Monodromy3& m) {
    return std::abs(m.M(1, 0)) * std::abs(m.compound(0, 2)) + std::abs(m.M(2, 0)) * std::abs(m.compound(1, 2));
}

double count_three_point_zeros(const ThirdOrderOperator& op, int n, int points) {
    return count_zeros_in_domain([&](cplx l) { return three_point_determinant(op, l); }, SpectralDomain{n}, points);
}

ThreePointEigen locate_mu(const ThirdOrderOperator& op, int n, const MuOptions& opts) {
    if (n == 0) throw InputError("three-point eigenvalues are indexed by n != 0", "three_point");
    const SpectralDomain D{n};
    auto f = [&](double l) { return three_point_determinant(op, l).real(); };
    auto df = [&](double l) {
        constexpr double h = 1e-30;
        return three_point_determinant(op, cplx(l, h)).imag() / h;
    };

    ThreePointEigen out;
    out.n = n;
    try {
        out.mu = locate_single_zero(f, df, D.real_lo(), D.real_hi(), opts.panels, "three_point", opts.hint);
    } catch (const CountMismatch& e) {
        throw CountMismatch(std::string(e.what()) + " (3-point determinant in D_" + std::to_string(n) + ")",
                            "three_point");
    }

    const Monodromy3 m = monodromy3(op, out.mu);
    const cplx phi3 = m.M(2, 0);
    const double row = std::abs(m.M(1, 0)) + std::abs(phi3);
    if (std::abs(phi3) <= 1e-12 * std::max(1.0, row))
        throw NormalizationFailure("phi_3(1, mu_" + std::to_string(n) + ") vanishes; y'(0) = 1 normalization fails");
    // y = phi_2 + c phi_3 with c = -phi_2(1)/phi_3(1); y'(1) through the
    // propagated minor phi_2(1) phi_3'(1) - phi_3(1) phi_2'(1).
    out.y0_second = (-m.M(1, 0) / phi3).real();
    out.y1_prime = (-m.compound(0, 2) / phi3).real();

    out.contour_count = std::numeric_limits<double>::quiet_NaN();
    if (opts.verify_count) {
        out.contour_count = count_three_point_zeros(op, n, opts.contour_points);
        if (std::abs(out.contour_count - 1.0) > 0.1)
            throw CountMismatch("argument principle gives " + std::to_string(out.contour_count) +
                                    " zeros of the 3-point determinant in D_" + std::to_string(n) + " (expected 1)",
                                "three_point");
    }
    return out;
}

ThreePointEigen locate_mu(const CoefficientPair& u, int n, const MuOptions& opts) {
    return locate_mu(ThirdOrderOperator(u), n, opts);
}

}  // namespace bsq
