#include "bsq/flow.hpp"

#include "bsq/errors.hpp"
#include "bsq/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <mutex>
#include <numbers>

namespace bsq {

namespace {

using std::numbers::pi;
using Modes = std::vector<cplx>;  // P_k for k = 1..M, f = sum P_k e^{2 pi i k x} + c.c.

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

Modes to_modes(const TrigSeries& f, int M) {
    Modes out(M);
    for (int k = 1; k <= M; ++k) out[k - 1] = cplx(f.a(k), -f.b(k)) * 0.5;
    return out;
}

TrigSeries from_modes(const Modes& m) {
    std::vector<double> a(m.size()), b(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) {
        a[k] = 2.0 * m[k].real();
        b[k] = -2.0 * m[k].imag();
    }
    return TrigSeries(std::move(a), std::move(b));
}

// Grid transforms on G >= 3M + 1 points: products of two fields with
// harmonics up to M are alias-free on the retained modes.
class Workspace {
public:
    explicit Workspace(int M) : M_(M), G_(4 * M) {
        spec_ = fftw_alloc_complex(G_ / 2 + 1);
        grid_ = fftw_alloc_real(G_);
        std::lock_guard lock(planner_mutex());
        to_grid_ = fftw_plan_dft_c2r_1d(G_, spec_, grid_, FFTW_ESTIMATE);
        to_spec_ = fftw_plan_dft_r2c_1d(G_, grid_, spec_, FFTW_ESTIMATE);
    }
    ~Workspace() {
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(to_grid_);
            fftw_destroy_plan(to_spec_);
        }
        fftw_free(spec_);
        fftw_free(grid_);
    }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    int grid_size() const { return G_; }

    /// Values of the field on the grid (left in the internal buffer).
    const double* synthesize(const Modes& m) {
        for (int k = 0; k <= G_ / 2; ++k) spec_[k][0] = spec_[k][1] = 0.0;
        for (int k = 1; k <= M_; ++k) {
            spec_[k][0] = m[k - 1].real();
            spec_[k][1] = m[k - 1].imag();
        }
        fftw_execute(to_grid_);
        return grid_;
    }

    /// Fourier modes 1..M of the squared field currently on the grid;
    /// `sup` receives max |field| before squaring.
    Modes square_modes(double* sup = nullptr) {
        double s = 0.0;
        for (int j = 0; j < G_; ++j) {
            s = std::max(s, std::abs(grid_[j]));
            grid_[j] *= grid_[j];
        }
        if (sup) *sup = s;
        fftw_execute(to_spec_);
        Modes out(M_);
        for (int k = 1; k <= M_; ++k) out[k - 1] = cplx(spec_[k][0], spec_[k][1]) / static_cast<double>(G_);
        return out;
    }

    double sup_norm(const Modes& m) {
        const double* g = synthesize(m);
        double s = 0.0;
        for (int j = 0; j < G_; ++j) s = std::max(s, std::abs(g[j]));
        return s;
    }

    double mean_cube(const Modes& m) {
        const double* g = synthesize(m);
        double s = 0.0;
        for (int j = 0; j < G_; ++j) s += g[j] * g[j] * g[j];
        return s / G_;
    }

private:
    int M_;
    int G_;
    fftw_complex* spec_;
    double* grid_;
    fftw_plan to_grid_;
    fftw_plan to_spec_;
};

struct Fields {
    Modes P, Q;
};

Fields axpy(const Fields& x, double a, const Fields& y) {
    Fields out = x;
    for (std::size_t k = 0; k < x.P.size(); ++k) {
        out.P[k] += a * y.P[k];
        out.Q[k] += a * y.Q[k];
    }
    return out;
}

class Stepper {
public:
    Stepper(int M, double blowup) : M_(M), ws_(M), blowup_(blowup) {}

    // Nonlinear part (0, -(4/3) (p^2)_x) in Fourier modes.
    Fields nonlinear(const Fields& w, double t) {
        ws_.synthesize(w.P);
        double sup = 0.0;
        const Modes sq = ws_.square_modes(&sup);
        if (!(sup <= blowup_)) {
            std::ostringstream msg;
            msg << "sup |p| = " << sup << " exceeds " << blowup_ << " at t = " << std::setprecision(10) << t;
            throw BlowUp(msg.str());
        }
        Fields out{Modes(M_), Modes(M_)};
        for (int k = 1; k <= M_; ++k) out.Q[k - 1] = -(4.0 / 3.0) * cplx(0.0, 2.0 * pi * k) * sq[k - 1];
        return out;
    }

    // Linear part: P_t = iK Q, Q_t = (i K^3 / 3) P.
    Fields linear(const Fields& w) const {
        Fields out{Modes(M_), Modes(M_)};
        for (int k = 1; k <= M_; ++k) {
            const double K = 2.0 * pi * k;
            out.P[k - 1] = cplx(0.0, K) * w.Q[k - 1];
            out.Q[k - 1] = cplx(0.0, K * K * K / 3.0) * w.P[k - 1];
        }
        return out;
    }

    // exp(L h) = cos(omega h) I + sin(omega h)/omega L, omega = K^2/sqrt 3.
    Fields propagate(const Fields& w, double h) const {
        Fields out{Modes(M_), Modes(M_)};
        for (int k = 1; k <= M_; ++k) {
            const double K = 2.0 * pi * k;
            const double omega = K * K / std::sqrt(3.0);
            const double c = std::cos(omega * h), s = std::sin(omega * h) / omega;
            out.P[k - 1] = c * w.P[k - 1] + s * cplx(0.0, K) * w.Q[k - 1];
            out.Q[k - 1] = c * w.Q[k - 1] + s * cplx(0.0, K * K * K / 3.0) * w.P[k - 1];
        }
        return out;
    }

    Fields full(const Fields& w, double t) { return axpy(linear(w), 1.0, nonlinear(w, t)); }

    void step(Fields& w, double t, double h, TimeScheme scheme) {
        if (scheme == TimeScheme::classical_rk4) {
            const Fields k1 = full(w, t);
            const Fields k2 = full(axpy(w, 0.5 * h, k1), t + 0.5 * h);
            const Fields k3 = full(axpy(w, 0.5 * h, k2), t + 0.5 * h);
            const Fields k4 = full(axpy(w, h, k3), t + h);
            w = axpy(axpy(axpy(axpy(w, h / 6.0, k1), h / 3.0, k2), h / 3.0, k3), h / 6.0, k4);
            return;
        }
        // Lawson: RK4 on v = exp(-L t) w with each stage mapped back to w.
        const Fields half = propagate(w, 0.5 * h);
        const Fields k1 = nonlinear(w, t);
        const Fields k2 = nonlinear(axpy(half, 0.5 * h, propagate(k1, 0.5 * h)), t + 0.5 * h);
        const Fields k3 = nonlinear(axpy(half, 0.5 * h, k2), t + 0.5 * h);
        const Fields k4 = nonlinear(axpy(propagate(w, h), h, propagate(k3, 0.5 * h)), t + h);
        Fields out = axpy(propagate(w, h), h / 6.0, propagate(k1, h));
        out = axpy(out, h / 3.0, propagate(axpy(k2, 1.0, k3), 0.5 * h));
        w = axpy(out, h / 6.0, k4);
    }

    Workspace& workspace() { return ws_; }

private:
    int M_;
    Workspace ws_;
    double blowup_;
};

Fields fields_of(const FlowState& s) { return {to_modes(s.p, s.modes), to_modes(s.q, s.modes)}; }

FlowState state_of(const Fields& w, double t, int modes) { return {t, from_modes(w.P), from_modes(w.Q), modes}; }

void check_finite(const FlowState& s) {
    for (const TrigSeries* f : {&s.p, &s.q})
        for (auto c : {f->cos_coeffs(), f->sin_coeffs()})
            for (double v : c)
                if (!std::isfinite(v)) throw InputError("flow state has a non-finite coefficient", "boussinesq_flow");
}

}  // namespace

FlowState make_flow_state(const CoefficientPair& u, int modes, double t) {
    if (modes < 1) throw InputError("flow needs at least one mode", "boussinesq_flow");
    if (u.order() > static_cast<std::size_t>(modes))
        throw InputError("initial data has harmonics above the flow truncation M = " + std::to_string(modes),
                         "boussinesq_flow");
    FlowState s{t, u.p.resized(modes), u.q.resized(modes), modes};
    check_finite(s);
    return s;
}

std::pair<TrigSeries, TrigSeries> flow_rhs(const FlowState& state) {
    Stepper st(state.modes, std::numeric_limits<double>::infinity());
    const Fields w = fields_of(state);
    const Fields r = st.full(w, state.t);
    return {from_modes(r.P), from_modes(r.Q)};
}

double flow_energy(const FlowState& state) {
    const Fields w = fields_of(state);
    // int f^2 = 2 sum |F_k|^2 for f = sum F_k e^{2 pi i k x} + c.c.
    double kinetic = 0.0, gradient = 0.0;
    for (int k = 1; k <= state.modes; ++k) {
        const double K = 2.0 * pi * k;
        kinetic += std::norm(w.Q[k - 1]);
        gradient += K * K * std::norm(w.P[k - 1]);
    }
    Workspace ws(state.modes);
    return kinetic + gradient / 3.0 - (4.0 / 9.0) * ws.mean_cube(w.P);
}

double flow_sup_norm(const FlowState& state) {
    Workspace ws(state.modes);
    return ws.sup_norm(to_modes(state.p, state.modes));
}

std::vector<FlowState> evolve(const FlowState& state0, double dt, double t_end, const FlowOptions& opts) {
    if (!(dt != 0.0) || !std::isfinite(dt) || !std::isfinite(t_end))
        throw InputError("evolve needs a finite nonzero dt and a finite t_end", "boussinesq_flow");
    const double dir = dt > 0 ? 1.0 : -1.0;
    if ((t_end - state0.t) * dir < 0.0) throw InputError("t_end lies behind state0.t for this sign of dt", "boussinesq_flow");
    check_finite(state0);

    std::vector<double> stops;
    for (double s : opts.snapshot_times)
        if ((s - state0.t) * dir > 0.0 && (t_end - s) * dir > 0.0) stops.push_back(s);
    stops.push_back(t_end);
    std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    Stepper st(state0.modes, opts.blowup_threshold);
    Fields w = fields_of(state0);
    std::vector<FlowState> out{state0};
    double t = state0.t;
    for (double stop : stops) {
        const double span = stop - t;
        if (span == 0.0) {
            out.push_back(state_of(w, stop, state0.modes));
            continue;
        }
        const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span / dt) - 1e-9)));
        const double h = span / static_cast<double>(steps);
        for (long i = 0; i < steps; ++i) st.step(w, t + i * h, h, opts.scheme);
        t = stop;
        out.push_back(state_of(w, t, state0.modes));
    }
    const double sup = st.workspace().sup_norm(w.P);
    if (!(sup <= opts.blowup_threshold)) {
        std::ostringstream msg;
        msg << "sup |p| = " << sup << " exceeds " << opts.blowup_threshold << " at t = " << std::setprecision(10) << t;
        throw BlowUp(msg.str());
    }
    return out;
}

DriftReport isospectral_check(const FlowState& state0, const std::vector<double>& times, const std::vector<int>& n_list,
                              double dt, const FlowOptions& opts, int threads) {
    for (int n : n_list)
        if (n == 0) throw InputError("isospectral_check tracks n != 0 only", "boussinesq_flow");
    std::vector<double> stops;
    for (double s : times)
        if (s != state0.t) stops.push_back(s);
    std::vector<FlowState> snaps{state0};
    if (!stops.empty()) {
        FlowOptions o = opts;
        o.snapshot_times = stops;
        const double t_end = dt > 0 ? *std::max_element(stops.begin(), stops.end())
                                    : *std::min_element(stops.begin(), stops.end());
        snaps = evolve(state0, dt, t_end, o);
    }
    for (const FlowState& s : snaps) check_ball(s.coefficients(), "isospectral_check");

    const std::size_t S = snaps.size(), N = n_list.size();
    std::vector<BranchPoints> found(S * N);
    std::vector<double> energy(S);
    parallel_for(S, threads, [&](std::size_t i) {
        const ThirdOrderOperator op(snaps[i].coefficients());
        LocateOptions lo;
        lo.verify_count = false;
        for (std::size_t j = 0; j < N; ++j) found[i * N + j] = locate_branch_points(op, n_list[j], lo);
        energy[i] = flow_energy(snaps[i]);
    });

    DriftReport rep;
    rep.energy = energy;
    rep.max_relative_drift = 0.0;
    for (const FlowState& s : snaps) rep.times.push_back(s.t);
    for (std::size_t j = 0; j < N; ++j) {
        DriftSeries ds{n_list[j], {}, {}, 0.0};
        const BranchPoints& b0 = found[j];
        for (std::size_t i = 0; i < S; ++i) {
            const BranchPoints& b = found[i * N + j];
            ds.r_minus.push_back(b.r_minus);
            ds.r_plus.push_back(b.r_plus);
            ds.max_relative_drift = std::max({ds.max_relative_drift, std::abs(b.r_minus - b0.r_minus) / std::abs(b0.r_minus),
                                              std::abs(b.r_plus - b0.r_plus) / std::abs(b0.r_plus)});
        }
        rep.max_relative_drift = std::max(rep.max_relative_drift, ds.max_relative_drift);
        rep.series.push_back(std::move(ds));
    }
    return rep;
}

void write_flow_csv(std::ostream& out, const std::vector<FlowState>& trajectory) {
    if (trajectory.empty()) return;
    const int M = trajectory.front().modes;
    out << 't';
    for (const char* f : {"p", "q"})
        for (const char* kind : {"cos", "sin"})
            for (int k = 1; k <= M; ++k) out << ',' << f << '_' << kind << k;
    out << '\n' << std::scientific << std::setprecision(16);
    for (const FlowState& s : trajectory) {
        out << s.t;
        for (const TrigSeries* f : {&s.p, &s.q}) {
            for (int k = 1; k <= M; ++k) out << ',' << f->a(k);
            for (int k = 1; k <= M; ++k) out << ',' << f->b(k);
        }
        out << '\n';
    }
}

nlohmann::json to_json(const DriftReport& report) {
    nlohmann::json series = nlohmann::json::array();
    for (const DriftSeries& s : report.series)
        series.push_back({{"n", s.n}, {"r_minus", s.r_minus}, {"r_plus", s.r_plus}, {"max_relative_drift", s.max_relative_drift}});
    return {{"times", report.times},
            {"energy", report.energy},
            {"series", series},
            {"max_relative_drift", report.max_relative_drift}};
}

}  // namespace bsq
