#pragma once

#include "bsq/errors.hpp"
#include "bsq/floquet.hpp"
#include "bsq/three_point.hpp"

#include "json.hpp"

#include <optional>
#include <vector>

namespace bsq {

/// One component g_n = (g_cn, g_sn) of the spectral map together with the
/// spectral quantities it was assembled from.
///
/// For n > 0 everything is computed on u. For n < 0 the entry is g_{|n|}
/// of u*^- (reflected and starred); r_minus, r_plus are still the branch
/// points of u in D_n, recovered as -r_{|n|}^{-+}(u*^-).
struct GapDatum {
    int n = 0;
    double g_cn = 0.0;
    double g_sn = 0.0;
    double gamma = 0.0;
    double h_sn = 0.0;
    double r_minus = 0.0;
    double r_plus = 0.0;
    bool closed = false;
    /// -mu_{-|n|}(w*) for the pipeline input w (u or u*^-): the positive
    /// 3-point eigenvalue entering g_cn.
    double mu = 0.0;
    double y1_prime = 0.0;
    double tau = 0.0;
    /// Branch-point search state of the pipeline input, reused as a hint.
    std::optional<BranchPoints> pipeline_branch;
};

struct SpectralData {
    int n_max = 0;
    /// Ordered n = 1, -1, 2, -2, ..., n_max, -n_max.
    std::vector<GapDatum> data;

    const GapDatum& at(int n) const;
    /// Flat real vector [g_c(1), g_s(1), g_c(-1), g_s(-1), g_c(2), ...]
    /// of length 4 n_max.
    std::vector<double> values() const;
};

struct ForwardOptions {
    int threads = 1;
    /// Argument-principle checks of the branch-point and 3-point counts.
    bool verify_counts = false;
    OdeOptions ode = {};
    /// Earlier result for nearby coefficients; speeds up the root searches.
    const SpectralData* hint = nullptr;
};

/// The gap component g_n(w) for n >= 1.
GapDatum gap_datum(const CoefficientPair& w, int n, const ForwardOptions& opts = {}, const GapDatum* hint = nullptr);

SpectralData forward_map(const CoefficientPair& u, int n_max, const ForwardOptions& opts = {});

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, std::vector<double> history, double condition, std::vector<double> best)
        : Error("NoConvergence", "spectral_map", what),
          residual_history(std::move(history)), condition_estimate(condition), best_iterate(std::move(best)) {}

    std::vector<double> residual_history;
    double condition_estimate;
    std::vector<double> best_iterate;
};

struct InvertOptions {
    double tol = 1e-8;
    int max_iter = 30;
    int threads = 1;
    /// Central-difference step: max(rel_step * |x_j|, min_step).
    double rel_step = 1e-6;
    /// Perturbations much smaller than this open gaps below the round-off
    /// floor of the discriminant, so the difference quotient would see noise.
    double min_step = 1e-4;
    double max_condition = 1e12;
    OdeOptions ode = {};
};

struct InvertResult {
    CoefficientPair u;
    int iterations = 0;
    std::vector<double> residual_history;
    double condition_estimate = 0.0;
};

/// Damped Newton on forward_map(u) - target over the Fourier coefficients
/// of (p, q) up to order n_max.
InvertResult invert_map(const SpectralData& target, const CoefficientPair& u0, const InvertOptions& opts = {});

/// Central-difference Jacobian of forward_map(...).values() at the packed
/// coefficient vector x (column-parallel).
Eigen::MatrixXd forward_jacobian(const std::vector<double>& x, int n_max, const InvertOptions& opts,
                                 const SpectralData* hint = nullptr);

// JSON: {"n_max": N, "data": [{"n", "g_c", "g_s", "r_minus", "r_plus", "mu_star"}, ...]},
// where mu_star is GapDatum::mu.
nlohmann::json to_json(const SpectralData& s);
/// Only "n", "g_c" and "g_s" are required; indices must cover +-1..+-n_max.
SpectralData spectral_data_from_json(const nlohmann::json& doc);

}  // namespace bsq
