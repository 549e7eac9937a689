#pragma once

#include "bsq/ode.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace bsq {

struct IdentityCheck {
    std::string name;
    /// Worst error over all indices the check covers, in the check's own
    /// (relative or scaled) units.
    double error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    /// Symmetries, containments and counts cover 1 <= |n| <= n_max.
    int n_max = 3;
    /// Hill-side identities cover n = 1..hill_n_max.
    int hill_n_max = 2;
    OdeOptions ode = {};
    int threads = 1;
    int det_points = 100;
    double det_radius = 500.0;
    int contour_points = 512;
    double det_tol = 1e-9;
    double symmetry_tol = 1e-6;
    double containment_slack = 1e-8;
    double hill_tol = 1e-6;
};

struct VerifyReport {
    std::vector<IdentityCheck> checks;

    bool all_passed() const;
    /// First failing check in table order, or nullptr.
    const IdentityCheck* first_failure() const;
};

/// Unimodularity of M, argument-principle counts, mu_n in [r_n^-, r_n^+],
/// the reflection/star symmetries of r_n^+- and mu_n, and the identities
/// linking the third-order data to the energy-dependent Hill problem.
VerifyReport verify_identities(const CoefficientPair& u, const VerifyOptions& opts = {});

void print_verify_table(std::ostream& out, const VerifyReport& report);
nlohmann::json to_json(const VerifyReport& report);

}  // namespace bsq
