#include "bsq/ode.hpp"

#include "bsq/errors.hpp"
#include "bsq/rk.hpp"

#include <cmath>
#include <iomanip>
#include <mutex>

namespace bsq {

StageTable::StageTable(const TrigSeries& f, int steps) : steps_(steps), values_(static_cast<std::size_t>(steps) * 13) {
    const Tableau& tab = fehlberg78();
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i)
        for (int s = 0; s < Tableau::kStages; ++s)
            values_[static_cast<std::size_t>(i) * 13 + s] = f((i + tab.c[s]) * h);
}

struct ThirdOrderOperator::Impl {
    CoefficientPair u;
    TrigSeries pq;  // p' + q
    OdeOptions opts;
    StageTable p_base, pq_base;
    mutable std::once_flag fine_once;
    mutable StageTable p_fine, pq_fine;

    Impl(CoefficientPair coeffs, OdeOptions o)
        : u(std::move(coeffs)), pq(u.p.derivative() + u.q), opts(o),
          p_base(u.p, o.steps_per_unit), pq_base(pq, o.steps_per_unit) {}

    void build_fine() const {
        std::call_once(fine_once, [this] {
            p_fine = StageTable(u.p, 2 * opts.steps_per_unit);
            pq_fine = StageTable(pq, 2 * opts.steps_per_unit);
        });
    }
};

ThirdOrderOperator::ThirdOrderOperator(CoefficientPair u, OdeOptions opts)
    : impl_(std::make_shared<Impl>(std::move(u), opts)) {
    if (opts.steps_per_unit < 1) throw InputError("steps_per_unit must be positive", "ode_engine");
}

const CoefficientPair& ThirdOrderOperator::coefficients() const noexcept { return impl_->u; }
const OdeOptions& ThirdOrderOperator::options() const noexcept { return impl_->opts; }

int ThirdOrderOperator::steps_for(cplx lambda) const noexcept {
    const int base = impl_->opts.steps_per_unit;
    return std::abs(lambda) > impl_->opts.doubling_threshold ? 2 * base : base;
}

const StageTable& ThirdOrderOperator::p_table(int steps) const {
    if (steps == impl_->opts.steps_per_unit) return impl_->p_base;
    impl_->build_fine();
    return impl_->p_fine;
}

const StageTable& ThirdOrderOperator::pq_table(int steps) const {
    if (steps == impl_->opts.steps_per_unit) return impl_->pq_base;
    impl_->build_fine();
    return impl_->pq_fine;
}

namespace {

constexpr double kOverflow = 1e300;

// C2(I + D) - I for the second exterior power C2 in the pair basis
// (0,1), (0,2), (1,2), expanded so that the identity terms cancel exactly.
Mat3 compound2_increment(const Mat3& D) {
    static constexpr int pr[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    auto P = [&](int a, int b) { return D(a, b) + (a == b ? 1.0 : 0.0); };
    Mat3 C;
    for (int I = 0; I < 3; ++I)
        for (int J = 0; J < 3; ++J) {
            const int i1 = pr[I][0], i2 = pr[I][1], j1 = pr[J][0], j2 = pr[J][1];
            if (I == J) {
                C(I, J) = D(i1, i1) + D(i2, i2) + D(i1, i1) * D(i2, i2) - D(i1, i2) * D(i2, i1);
            } else {
                C(I, J) = P(i1, j1) * P(i2, j2) - P(i1, j2) * P(i2, j1);
            }
        }
    return C;
}

// Running product (I + D_k) ... (I + D_1) kept as hi + lo. The update
// hi + D hi is summed with an exact error term, so rounding per step is
// relative to |D hi| rather than |hi|.
struct CompensatedProduct {
    Mat3 hi = Mat3::Identity();
    Mat3 lo = Mat3::Zero();

    static void two_sum(double& a, double b, double& err) {
        const double s = a + b;
        const double bb = s - a;
        err += (a - (s - bb)) + (b - bb);
        a = s;
    }

    void apply(const Mat3& D) {
        const Mat3 T = D * hi + D * lo;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double re = hi(i, j).real(), im = hi(i, j).imag();
                double ere = lo(i, j).real(), eim = lo(i, j).imag();
                two_sum(re, T(i, j).real(), ere);
                two_sum(im, T(i, j).imag(), eim);
                hi(i, j) = cplx(re, im);
                lo(i, j) = cplx(ere, eim);
            }
    }

    Mat3 value() const { return hi + lo; }
};

void guard(const Mat3& m, const char* what) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const cplx v = m(i, j);
            if (!(std::abs(v.real()) < kOverflow && std::abs(v.imag()) < kOverflow))
                throw NonFinite(std::string(what) + ": fundamental matrix overflowed");
        }
}

// P - I for the one-step propagator P of Y' = A Y (RK stages applied to
// the identity).
Mat3 step_increment(const StageTable& p, const StageTable& pq, int step, cplx lambda, double h) {
    const Tableau& tab = fehlberg78();
    std::array<Mat3, Tableau::kStages> K;
    Mat3 D = Mat3::Zero();
    for (int s = 0; s < Tableau::kStages; ++s) {
        Mat3 X = Mat3::Identity();
        for (int j = 0; j < s; ++j)
            if (tab.a[s][j] != 0.0) X.noalias() += tab.a[s][j] * K[j];
        const cplx c0 = lambda - pq(step, s);
        const cplx c1 = -2.0 * p(step, s);
        K[s].row(0) = h * X.row(1);
        K[s].row(1) = h * X.row(2);
        K[s].row(2) = h * (c0 * X.row(0) + c1 * X.row(1));
        if (tab.b[s] != 0.0) D.noalias() += tab.b[s] * K[s];
    }
    return D;
}

}  // namespace

cplx Monodromy3::three_point_det() const {
    // w = phi3(1) phi2 - phi2(1) phi3 vanishes at 0 and 1; its state at x = 1
    // is (0, -m01, -m02) with m the minors of (phi2, phi3), and F = -w(2).
    const cplx m01 = compound(0, 2);
    const cplx m02 = compound(1, 2);
    return M(1, 0) * m01 + M(2, 0) * m02;
}

cplx Monodromy3::three_point_det_direct() const {
    return M(1, 0) * M2(2, 0) - M(2, 0) * M2(1, 0);
}

Monodromy3 monodromy3(const ThirdOrderOperator& op, cplx lambda, PeriodTwo period_two) {
    const int steps = op.steps_for(lambda);
    const StageTable& p = op.p_table(steps);
    const StageTable& pq = op.pq_table(steps);
    const double h = 1.0 / steps;

    CompensatedProduct phi, comp;
    for (int i = 0; i < steps; ++i) {
        const Mat3 D = step_increment(p, pq, i, lambda, h);
        phi.apply(D);
        comp.apply(compound2_increment(D));
        if ((i & 63) == 63) guard(phi.hi, "monodromy3");
    }
    guard(phi.hi, "monodromy3");

    Monodromy3 out;
    out.lambda = lambda;
    out.M = phi.value().transpose();
    out.compound = comp.value();
    // Laplace expansion along the first state row, summed in long double
    // from the unrounded hi + lo parts.
    using L = std::complex<long double>;
    auto lv = [](const CompensatedProduct& c, int i, int j) { return L(c.hi(i, j)) + L(c.lo(i, j)); };
    out.determinant = static_cast<cplx>(lv(phi, 0, 0) * lv(comp, 2, 2) - lv(phi, 0, 1) * lv(comp, 2, 1) +
                                        lv(phi, 0, 2) * lv(comp, 2, 0));

    if (period_two == PeriodTwo::compute) {
        CompensatedProduct phi2 = phi;
        for (int i = 0; i < steps; ++i) {
            phi2.apply(step_increment(p, pq, i, lambda, h));
            if ((i & 63) == 63) guard(phi2.hi, "monodromy3");
        }
        guard(phi2.hi, "monodromy3");
        out.M2 = phi2.value().transpose();
        out.has_M2 = true;
    }
    return out;
}

Monodromy3 monodromy3(const CoefficientPair& u, cplx lambda, PeriodTwo period_two) {
    return monodromy3(ThirdOrderOperator(u), lambda, period_two);
}

Vec3 integrate_third_order(const ThirdOrderOperator& op, cplx lambda, double x_end, const Vec3& y0,
                           Trajectory* trajectory) {
    const int steps = op.steps_for(lambda);
    const StageTable& p = op.p_table(steps);
    const StageTable& pq = op.pq_table(steps);
    const TrigSeries& ps = op.coefficients().p;
    const TrigSeries pqs = op.coefficients().p.derivative() + op.coefficients().q;
    const double h = 1.0 / steps;

    using State = std::array<cplx, 3>;
    auto rhs = [&](const StagePoint& at, const State& y) -> State {
        double pv, pqv;
        if (at.step >= 0) {
            pv = p(at.step % steps, at.stage);
            pqv = pq(at.step % steps, at.stage);
        } else {
            pv = ps(at.x);
            pqv = pqs(at.x);
        }
        return {y[1], y[2], (lambda - pqv) * y[0] - 2.0 * pv * y[1]};
    };

    State y{y0(0), y0(1), y0(2)};
    auto record = [&](double x) {
        if (trajectory) trajectory->push_back({x, Vec3(y[0], y[1], y[2])});
    };
    record(0.0);
    const long full = static_cast<long>(std::floor(x_end * steps + 1e-9));
    for (long i = 0; i < full; ++i) {
        rk_step(y, i * h, h, static_cast<int>(i % steps), rhs);
        record((i + 1) * h);
        for (const cplx& v : y)
            if (!(std::abs(v.real()) < kOverflow && std::abs(v.imag()) < kOverflow))
                throw NonFinite("integrate_third_order: state overflowed");
    }
    const double rest = x_end - full * h;
    if (rest > 1e-14) {
        rk_step(y, full * h, rest, -1, rhs);
        record(x_end);
    }
    return Vec3(y[0], y[1], y[2]);
}

Vec3 integrate_third_order(const CoefficientPair& u, cplx lambda, double x_end, const Vec3& y0,
                           Trajectory* trajectory) {
    return integrate_third_order(ThirdOrderOperator(u), lambda, x_end, y0, trajectory);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "x,re_y,im_y,re_dy,im_dy,re_d2y,im_d2y\n";
    out << std::scientific << std::setprecision(16);
    for (const auto& pt : trajectory) {
        out << pt.x;
        for (int k = 0; k < 3; ++k) out << ',' << pt.y(k).real() << ',' << pt.y(k).imag();
        out << '\n';
    }
}

StaticPotential::StaticPotential(TrigSeries v, int steps)
    : v_(std::move(v)), table_(std::make_shared<StageTable>(v_, steps)) {}

namespace {

Monodromy2 hill_static(const StaticPotential& V, cplx E) {
    const StageTable& tab = V.table();
    const int steps = tab.steps();
    const double h = 1.0 / steps;
    using State = std::array<cplx, 4>;
    auto rhs = [&](const StagePoint& at, const State& y) -> State {
        const cplx k = tab(at.step, at.stage) - E;
        return {y[1], k * y[0], y[3], k * y[2]};
    };
    State y{1.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < steps; ++i) rk_step(y, i * h, h, i, rhs);
    for (const cplx& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFinite("monodromy2: non-finite state");
    return {E, y[0], y[1], y[2], y[3]};
}

Monodromy2 hill_floquet(const FloquetPotential& V, cplx E) {
    const int steps = V.op.steps_for(V.lambda);
    const StageTable& p = V.op.p_table(steps);
    const StageTable& pq = V.op.pq_table(steps);
    const double h = 1.0 / steps;
    const cplx lambda = V.lambda;
    using State = std::array<cplx, 6>;
    auto rhs = [&](const StagePoint& at, const State& y) -> State {
        const double pv = p(at.step, at.stage);
        const cplx w = y[0], s = y[1];
        const cplx k = -2.0 * pv - 1.5 * s + 0.75 * w * w;  // V - E
        return {s - w * w, (lambda - pq(at.step, at.stage)) - 2.0 * pv * w - w * s, y[3], k * y[2], y[5], k * y[4]};
    };
    State y{V.w0, V.s0, 1.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < steps; ++i) rk_step(y, i * h, h, i, rhs);
    for (const cplx& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFinite("monodromy2: non-finite state");
    return {E, y[2], y[3], y[4], y[5]};
}

}  // namespace

Monodromy2 monodromy2(const HillPotential& V, cplx E) {
    return std::visit(
        [&](const auto& pot) -> Monodromy2 {
            using T = std::decay_t<decltype(pot)>;
            if constexpr (std::is_same_v<T, StaticPotential>)
                return hill_static(pot, E);
            else
                return hill_floquet(pot, E);
        },
        V);
}

std::array<cplx, 2> riccati_period_map(const FloquetPotential& V) {
    const int steps = V.op.steps_for(V.lambda);
    const StageTable& p = V.op.p_table(steps);
    const StageTable& pq = V.op.pq_table(steps);
    const double h = 1.0 / steps;
    using State = std::array<cplx, 2>;
    auto rhs = [&](const StagePoint& at, const State& y) -> State {
        const double pv = p(at.step, at.stage);
        return {y[1] - y[0] * y[0], (V.lambda - pq(at.step, at.stage)) - 2.0 * pv * y[0] - y[0] * y[1]};
    };
    State y{V.w0, V.s0};
    for (int i = 0; i < steps; ++i) rk_step(y, i * h, h, i, rhs);
    return y;
}

}  // namespace bsq
