#pragma once

#include "bsq/floquet.hpp"

#include <ostream>
#include <vector>

namespace bsq {

/// Solution of p_t = q_x, q_t = -(1/3)(p_xxx + 4 (p^2)_x) on the circle,
/// truncated to `modes` Fourier harmonics.
struct FlowState {
    double t = 0.0;
    TrigSeries p;
    TrigSeries q;
    int modes = 64;

    CoefficientPair coefficients() const { return {p, q}; }
};

FlowState make_flow_state(const CoefficientPair& u, int modes = 64, double t = 0.0);

enum class TimeScheme {
    /// RK4 on e^{-Lt} w (the linear part is propagated exactly).
    integrating_factor_rk4,
    /// Plain RK4 on the full right-hand side; unstable once
    /// dt (2 pi M)^2 / sqrt 3 exceeds about 2.8.
    classical_rk4,
};

struct FlowOptions {
    TimeScheme scheme = TimeScheme::integrating_factor_rk4;
    /// Snapshot times (besides the start); t_end is always included.
    std::vector<double> snapshot_times;
    double blowup_threshold = 1e3;
};

/// (p_t, q_t) with the quadratic term evaluated on a zero-padded grid
/// of at least 3M + 1 points, so the retained harmonics are alias-free.
std::pair<TrigSeries, TrigSeries> flow_rhs(const FlowState& state);

/// Hamiltonian int q^2/2 + p_x^2/6 - (4/9) p^3 dx, conserved by the flow.
double flow_energy(const FlowState& state);

/// Max of |p| on the padded grid.
double flow_sup_norm(const FlowState& state);

/// Integrates from state0.t to t_end with step dt (negative dt runs
/// backwards; the step is adjusted so an integer number lands on each
/// snapshot). Returns the initial state and one state per snapshot time.
std::vector<FlowState> evolve(const FlowState& state0, double dt, double t_end, const FlowOptions& opts = {});

struct DriftSeries {
    int n;
    std::vector<double> r_minus;
    std::vector<double> r_plus;
    double max_relative_drift;
};

struct DriftReport {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<DriftSeries> series;
    double max_relative_drift;
};

/// Evolves to each time in `times` and tracks r_n^+- for n in n_list.
DriftReport isospectral_check(const FlowState& state0, const std::vector<double>& times, const std::vector<int>& n_list,
                              double dt, const FlowOptions& opts = {}, int threads = 1);

/// CSV: t, then p.cos(1..M), p.sin(1..M), q.cos(1..M), q.sin(1..M).
void write_flow_csv(std::ostream& out, const std::vector<FlowState>& trajectory);
nlohmann::json to_json(const DriftReport& report);

}  // namespace bsq
