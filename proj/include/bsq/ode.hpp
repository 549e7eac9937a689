#pragma once

#include "bsq/periodic.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <memory>
#include <ostream>
#include <variant>
#include <vector>

namespace bsq {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

struct OdeOptions {
    int steps_per_unit = 2048;
    /// Step count is doubled for |lambda| above this value.
    double doubling_threshold = 1e4;
};

/// Values of a TrigSeries at every RK stage point of a uniform grid on [0,1).
class StageTable {
public:
    StageTable() = default;
    StageTable(const TrigSeries& f, int steps);

    int steps() const noexcept { return steps_; }
    double operator()(int step, int stage) const noexcept { return values_[static_cast<std::size_t>(step) * 13 + stage]; }

private:
    int steps_ = 0;
    std::vector<double> values_;
};

/// The third-order operator y''' + (p y)' + p y' + q y with coefficient
/// samples prepared for fixed-step integration.
///
/// Cheap to copy; the tables are shared and never mutated after
/// construction (the doubled-resolution tables are built on first use).
class ThirdOrderOperator {
public:
    explicit ThirdOrderOperator(CoefficientPair u, OdeOptions opts = {});

    const CoefficientPair& coefficients() const noexcept;
    const OdeOptions& options() const noexcept;
    int steps_for(cplx lambda) const noexcept;

    /// p and (p' + q) at the stage points of a grid with `steps` steps;
    /// `steps` must be steps_per_unit or twice that.
    const StageTable& p_table(int steps) const;
    const StageTable& pq_table(int steps) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Fundamental-matrix data of the third-order equation at a spectral
/// parameter.
///
/// `M(j,k)` is the (k)-th derivative of the j-th fundamental solution at
/// x = 1 (rows are solutions, initial data phi_j^{(k)}(0) = delta_jk).
/// `compound` is the second exterior power of the state transition over
/// one period: entry (I,J) for index pairs I,J in {(0,1),(0,2),(1,2)} is
/// the 2x2 minor of the transition with state rows I and solution
/// columns J. It is propagated step by step, so it stays accurate when
/// the fundamental matrix is dominated by a single growing mode.
struct Monodromy3 {
    cplx lambda;
    Mat3 M;
    Mat3 compound;
    /// Values at x = 2 from continued integration (only when requested).
    Mat3 M2;
    bool has_M2 = false;

    cplx trace() const { return M.trace(); }
    /// Sum of the principal 2x2 minors of M.
    cplx minor_trace() const { return compound.trace(); }
    /// Laplace expansion along the first state row against the propagated
    /// minors, evaluated before the running products are rounded.
    cplx determinant;

    cplx det() const { return determinant; }
    /// phi_2(1) phi_3(2) - phi_3(1) phi_2(2), evaluated from one-period data.
    cplx three_point_det() const;
    /// Same determinant from the x = 2 values (loses accuracy for large |lambda|).
    cplx three_point_det_direct() const;
};

enum class PeriodTwo { skip, compute };

Monodromy3 monodromy3(const ThirdOrderOperator& op, cplx lambda, PeriodTwo period_two = PeriodTwo::skip);
Monodromy3 monodromy3(const CoefficientPair& u, cplx lambda, PeriodTwo period_two = PeriodTwo::skip);

struct TrajectoryPoint {
    double x;
    Vec3 y;
};
using Trajectory = std::vector<TrajectoryPoint>;

/// Integrates Y' = A(x, lambda) Y with Y = (y, y', y'') from x = 0 to x_end
/// and returns Y(x_end). Grid-node states are appended to `trajectory` when
/// it is non-null.
Vec3 integrate_third_order(const ThirdOrderOperator& op, cplx lambda, double x_end, const Vec3& y0,
                           Trajectory* trajectory = nullptr);
Vec3 integrate_third_order(const CoefficientPair& u, cplx lambda, double x_end, const Vec3& y0,
                           Trajectory* trajectory = nullptr);

/// CSV columns: x, Re y, Im y, Re y', Im y', Re y'', Im y''.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Second-order (Hill) equation -u'' + V(x, E) u = E u.

/// Energy-independent potential V(x, E) = v(x).
class StaticPotential {
public:
    explicit StaticPotential(TrigSeries v, int steps = 2048);
    const TrigSeries& v() const noexcept { return v_; }
    const StageTable& table() const noexcept { return *table_; }

private:
    TrigSeries v_;
    std::shared_ptr<const StageTable> table_;
};

/// Energy-dependent potential generated by a Floquet solution f of the
/// third-order equation at lambda:
///     V = E - 2p - (3/2) f''/f + (3/4) (f'/f)^2.
/// Only the log-derivatives w = f'/f and s = f''/f enter; they are
/// integrated alongside the Hill system from (w0, s0) at x = 0.
struct FloquetPotential {
    ThirdOrderOperator op;
    cplx lambda;
    cplx w0;
    cplx s0;
};

using HillPotential = std::variant<StaticPotential, FloquetPotential>;

/// theta(0)=1, theta'(0)=0; phi(0)=0, phi'(0)=1; values at x = 1.
struct Monodromy2 {
    cplx E;
    cplx theta;
    cplx theta_prime;
    cplx phi;
    cplx phi_prime;

    cplx wronskian() const { return theta * phi_prime - theta_prime * phi; }
    /// (theta(1) + phi'(1)) / 2
    cplx discriminant() const { return 0.5 * (theta + phi_prime); }
};

Monodromy2 monodromy2(const HillPotential& V, cplx E);

/// Riccati state (w, s) = (f'/f, f''/f) of the Floquet solution after one
/// period; equals (w0, s0) when the start is the exact Floquet datum.
std::array<cplx, 2> riccati_period_map(const FloquetPotential& V);

}  // namespace bsq
