#include "bsq/floquet.hpp"

#include "bsq/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

namespace bsq {

namespace {

using std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
const double kRadius = 2.0 / kSqrt3;

}  // namespace

cplx cube_root(cplx lambda) {
    if (lambda == cplx(0.0)) return 0.0;
    double a = std::arg(lambda);
    if (a <= -pi + 1e-300 && lambda.imag() == 0.0) a = pi;  // -0.0 imaginary part
    return std::polar(std::cbrt(std::abs(lambda)), a / 3.0);
}

double SpectralDomain::center() const {
    const double c = 2.0 * pi * std::abs(n) / kSqrt3;
    return n < 0 ? -c * c * c : c * c * c;
}

double SpectralDomain::real_lo() const {
    if (n == 0) return -kRadius * kRadius * kRadius;
    const int m = std::abs(n);
    const double lo = std::pow((2.0 * pi * m - 2.0) / kSqrt3, 3);
    const double hi = std::pow((2.0 * pi * m + 2.0) / kSqrt3, 3);
    return n > 0 ? lo : -hi;
}

double SpectralDomain::real_hi() const {
    if (n == 0) return kRadius * kRadius * kRadius;
    return -SpectralDomain{-n}.real_lo();
}

cplx SpectralDomain::boundary(double theta) const {
    const cplx e = std::polar(1.0, theta);
    if (n == 0) return kRadius * kRadius * kRadius * e;
    const cplx z = 2.0 * pi * std::abs(n) / kSqrt3 + kRadius * e;
    const cplx l = z * z * z;
    return n > 0 ? l : -l;
}

bool SpectralDomain::contains(cplx lambda) const {
    if (n == 0) return std::abs(lambda) < kRadius * kRadius * kRadius;
    if (n < 0) return SpectralDomain{-n}.contains(-lambda);
    return std::abs(cube_root(lambda) - 2.0 * pi * n / kSqrt3) < kRadius;
}

DiscriminantValue discriminant(const Monodromy3& m) {
    const cplx c2 = m.trace();
    const cplx c1 = m.minor_trace();
    const cplx rho = c2 * c2 * c1 * c1 - 4.0 * c1 * c1 * c1 - 4.0 * c2 * c2 * c2 + 18.0 * c2 * c1 - 27.0;
    const double a = std::abs(c2), b = std::abs(c1);
    const double scale = a * a * b * b + 4.0 * b * b * b + 4.0 * a * a * a + 18.0 * a * b + 27.0;
    if (!std::isfinite(rho.real()) || !std::isfinite(rho.imag()) || !std::isfinite(scale))
        throw NonFinite("discriminant is not finite", "floquet_surface");
    return {m.lambda, rho, c2, c1, scale};
}

DiscriminantValue discriminant(const ThirdOrderOperator& op, cplx lambda) {
    return discriminant(monodromy3(op, lambda));
}

DiscriminantValue discriminant(const CoefficientPair& u, cplx lambda) {
    return discriminant(ThirdOrderOperator(u), lambda);
}

double discriminant_slope(const ThirdOrderOperator& op, double lambda) {
    constexpr double h = 1e-30;
    return discriminant(op, cplx(lambda, h)).rho.imag() / h;
}

namespace {

// Dominant root of t^3 - c2 t^2 + c1 t - 1 by Newton from t = c2. One
// iteration past convergence settles the complex-step component as well.
cplx dominant_root(cplx c2, cplx c1) {
    cplx t = c2;
    bool done = false;
    for (int it = 0; it < 20; ++it) {
        const cplx f = ((t - c2) * t + c1) * t - 1.0;
        const cplx df = (3.0 * t - 2.0 * c2) * t + c1;
        const cplx dt = f / df;
        t -= dt;
        if (done) break;
        done = std::abs(dt) <= 1e-15 * std::abs(t);
    }
    return t;
}

cplx collision(const Monodromy3& m, double* scale) {
    const cplx c1 = m.minor_trace();
    const cplx t1 = dominant_root(m.trace(), c1);
    const cplx s = (c1 - 1.0 / t1) / t1;
    if (scale) *scale = std::norm(s) + 4.0 / std::abs(t1);
    return s * s - 4.0 / t1;
}

}  // namespace

Sample collision_factor(const Monodromy3& m) {
    double scale = 0.0;
    const cplx k = collision(m, &scale);
    return {k.real(), scale};
}

cplx collision_factor_value(const ThirdOrderOperator& op, cplx lambda) {
    return collision(monodromy3(op, lambda), nullptr);
}

std::array<cplx, 3> floquet_multipliers(const Monodromy3& m) {
    const cplx c2 = m.trace(), c1 = m.minor_trace(), c0 = m.det();
    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(0, 0) = c2;
    companion(0, 1) = -c1;
    companion(0, 2) = c0;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    const Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion, false);
    std::array<cplx, 3> t;
    for (int k = 0; k < 3; ++k) {
        cplx x = es.eigenvalues()(k);
        for (int it = 0; it < 4; ++it) {
            const cplx f = ((x - c2) * x + c1) * x - c0;
            const cplx df = (3.0 * x - 2.0 * c2) * x + c1;
            if (df == cplx(0.0)) break;
            const cplx dx = f / df;
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::abs(x)) break;
        }
        t[k] = x;
    }
    return t;
}

bool in_tau_domain(cplx lambda) {
    return std::abs(lambda) > 1.0 && std::abs(std::arg(lambda)) < 0.75 * pi;
}

cplx select_tau(const Monodromy3& m) {
    if (!in_tau_domain(m.lambda))
        throw DomainError("tau is defined only for |lambda| > 1 and |arg lambda| < 3 pi / 4", "floquet_surface");
    const cplx target = std::exp(cube_root(m.lambda));
    auto t = floquet_multipliers(m);
    std::sort(t.begin(), t.end(), [&](cplx a, cplx b) { return std::abs(a - target) < std::abs(b - target); });
    if (std::abs(t[0] - t[1]) <= 1e-6 * std::abs(t[0]))
        throw AmbiguousSelection("two multipliers nearest exp(lambda^{1/3}) coincide to 1e-6", "floquet_surface");
    return t[0];
}

cplx select_tau(const ThirdOrderOperator& op, cplx lambda) {
    if (!in_tau_domain(lambda))
        throw DomainError("tau is defined only for |lambda| > 1 and |arg lambda| < 3 pi / 4", "floquet_surface");
    return select_tau(monodromy3(op, lambda));
}

cplx select_tau(const CoefficientPair& u, cplx lambda) { return select_tau(ThirdOrderOperator(u), lambda); }

double count_zeros_in_domain(const std::function<cplx(cplx)>& f, const SpectralDomain& D, int points) {
    return winding_number([&](double theta) { return f(D.boundary(theta)); }, points);
}

double count_rho_zeros(const ThirdOrderOperator& op, int n, int points) {
    return count_zeros_in_domain([&](cplx l) { return discriminant(op, l).rho; }, SpectralDomain{n}, points);
}

namespace {

BranchPoints locate_in(const ThirdOrderOperator& op, int n, const LocateOptions& opts, const char* what) {
    const SpectralDomain D{n};
    // For n > 0 the colliding pair is exponentially small next to tau_1;
    // the collision factor resolves it where rho cannot.
    const bool use_collision = n > 0;
    auto f = [&](double l) {
        if (use_collision) return collision_factor(monodromy3(op, l));
        const DiscriminantValue d = discriminant(op, l);
        return Sample{d.rho.real(), d.scale};
    };
    auto df = [&](double l) {
        if (!use_collision) return discriminant_slope(op, l);
        constexpr double h = 1e-30;
        return collision_factor_value(op, cplx(l, h)).imag() / h;
    };

    PairSearch search;
    search.panels = opts.panels;
    search.closed_tol = opts.closed_tol;
    search.module = "floquet_surface";
    search.what = what;
    std::optional<PairLocation> hint;
    if (opts.hint && opts.hint->n == n)
        hint = PairLocation{opts.hint->r_minus, opts.hint->r_plus, opts.hint->peak,
                            opts.hint->peak_value, opts.hint->peak_scale, opts.hint->closed};

    const PairLocation loc = locate_zero_pair(f, df, D.real_lo(), D.real_hi(), search, hint);
    BranchPoints out;
    out.n = n;
    out.r_minus = loc.lower;
    out.r_plus = loc.upper;
    out.peak = loc.peak;
    out.peak_value = loc.peak_value;
    out.peak_scale = loc.peak_scale;
    out.closed = loc.closed || (loc.upper - loc.lower) < opts.closed_width * (1.0 + std::abs(loc.peak));
    out.contour_count = std::numeric_limits<double>::quiet_NaN();
    if (opts.verify_count) {
        out.contour_count = count_rho_zeros(op, n, opts.contour_points);
        if (std::abs(out.contour_count - 2.0) > 0.1)
            throw CountMismatch("argument principle gives " + std::to_string(out.contour_count) +
                                    " zeros of rho in D_" + std::to_string(n) + " (expected 2)",
                                "floquet_surface");
    }
    return out;
}

}  // namespace

BranchPoints locate_branch_points(const ThirdOrderOperator& op, int n, const LocateOptions& opts) {
    if (n == 0) throw InputError("branch points are indexed by n != 0; use locate_r0", "floquet_surface");
    const std::string what = "rho zeros in D_" + std::to_string(n);
    return locate_in(op, n, opts, what.c_str());
}

BranchPoints locate_branch_points(const CoefficientPair& u, int n, const LocateOptions& opts) {
    return locate_branch_points(ThirdOrderOperator(u), n, opts);
}

BranchPoints locate_r0(const ThirdOrderOperator& op, const LocateOptions& opts) {
    return locate_in(op, 0, opts, "rho zeros in D_0");
}

BranchPoints locate_r0(const CoefficientPair& u, const LocateOptions& opts) {
    return locate_r0(ThirdOrderOperator(u), opts);
}

void write_rho_csv(std::ostream& out, const ThirdOrderOperator& op, double lo, double hi, int points) {
    out << "lambda,rho,rho_over_scale\n";
    out << std::scientific << std::setprecision(16);
    for (int k = 0; k < points; ++k) {
        const double l = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
        const DiscriminantValue d = discriminant(op, l);
        out << l << ',' << d.rho.real() << ',' << d.rho.real() / d.scale << '\n';
    }
}

}  // namespace bsq
