#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace bsq {

/// Explicit Runge-Kutta tableau with a fixed number of stages.
struct Tableau {
    static constexpr int kStages = 13;
    int order;
    std::array<double, kStages> c;
    std::array<double, kStages> b;
    std::array<std::array<double, kStages>, kStages> a;
};

/// Fehlberg's 13-stage pair, 8th-order solution weights.
const Tableau& fehlberg78();

/// Location of an RK stage: step index on the uniform grid plus stage
/// number. `step < 0` marks an off-grid (partial) step, where tabulated
/// coefficient values are unavailable and callers evaluate directly at x.
struct StagePoint {
    int step;
    int stage;
    double x;
};

/// Advances `y` by one explicit RK step of size h starting at x0.
/// `rhs(StagePoint, const State&) -> State` must return the derivative.
template <class State, class Rhs>
void rk_step(State& y, double x0, double h, int step_index, Rhs&& rhs, const Tableau& tab = fehlberg78()) {
    constexpr int S = Tableau::kStages;
    std::array<State, S> k;
    for (int s = 0; s < S; ++s) {
        State ys = y;
        for (int j = 0; j < s; ++j) {
            const double aj = tab.a[s][j];
            if (aj == 0.0) continue;
            for (std::size_t m = 0; m < ys.size(); ++m) ys[m] += (h * aj) * k[j][m];
        }
        k[s] = rhs(StagePoint{step_index, s, x0 + tab.c[s] * h}, ys);
    }
    for (int s = 0; s < S; ++s) {
        const double bs = tab.b[s];
        if (bs == 0.0) continue;
        for (std::size_t m = 0; m < y.size(); ++m) y[m] += (h * bs) * k[s][m];
    }
}

}  // namespace bsq
