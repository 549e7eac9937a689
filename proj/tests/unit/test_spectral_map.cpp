#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsq/errors.hpp"
#include "bsq/hill.hpp"
#include "bsq/spectral_map.hpp"
#include "support.hpp"

#include <cmath>

using namespace bsq;

TEST_CASE("zero coefficients map to zero data") {
    const SpectralData s = forward_map(CoefficientPair{TrigSeries(1), TrigSeries(1)}, 3);
    REQUIRE(s.data.size() == 6);
    CHECK(s.data[0].n == 1);
    CHECK(s.data[1].n == -1);
    CHECK(s.data[5].n == -3);
    for (double v : s.values()) CHECK(std::abs(v) < 1e-8);
    for (const GapDatum& d : s.data) {
        CHECK(d.closed);
        CHECK(std::abs(d.r_minus - test::free_center(d.n)) < 1e-10 * std::abs(d.r_minus));
    }
}

TEST_CASE("g_c and g_s assemble from the Hill-side quantities") {
    const CoefficientPair u = test::random_pair(61, 3, 0.05);
    const GapDatum d = gap_datum(u, 1);
    const HillSpectra h = hill_spectra(u, 1);
    // independent route: gap coordinates of the Hill side
    const double gc = 0.5 * (h.E_plus + h.E_minus) - h.gm;
    const double gap = h.E_plus - h.E_minus;
    const double gs = std::sqrt(std::abs(0.25 * gap * gap - gc * gc)) * dead_zone_sign(std::log(std::abs(h.phi1_prime)));
    CHECK(d.g_cn == doctest::Approx(gc).epsilon(1e-6));
    CHECK(d.g_sn == doctest::Approx(gs).epsilon(1e-6));
    CHECK(d.gamma == doctest::Approx(gap).epsilon(1e-6));
    // point (g_c, g_s) on the circle of radius gamma/2
    CHECK(std::hypot(d.g_cn, d.g_sn) == doctest::Approx(0.5 * d.gamma).epsilon(1e-9));
}

TEST_CASE("negative indices come from the reflected star") {
    const CoefficientPair u = test::random_pair(62, 2, 0.05);
    const SpectralData s = forward_map(u, 2);
    const SpectralData m = forward_map(apply_symmetry(u, Symmetry::star_reflect), 2);
    for (int n : {1, 2}) {
        CHECK(s.at(-n).g_cn == doctest::Approx(m.at(n).g_cn).epsilon(1e-12));
        CHECK(s.at(-n).g_sn == doctest::Approx(m.at(n).g_sn).epsilon(1e-12));
        // branch points of u in D_{-n}
        const BranchPoints b = locate_branch_points(u, -n);
        CHECK(s.at(-n).r_minus == doctest::Approx(b.r_minus).epsilon(1e-9));
        CHECK(s.at(-n).r_plus == doctest::Approx(b.r_plus).epsilon(1e-9));
    }
}

TEST_CASE("a narrow gap still contains the Dirichlet point") {
    // The third gap of the reflected star of this u is about 2e-7 wide
    // relative, with a bump below the closed-gap threshold.
    const CoefficientPair w = apply_symmetry(test::random_pair(2002, 4, 0.035), Symmetry::star_reflect);
    ForwardOptions fo;
    fo.verify_counts = false;
    const GapDatum d = gap_datum(w, 3, fo);
    REQUIRE(d.r_plus > d.r_minus);
    CHECK(d.mu >= d.r_minus);
    CHECK(d.mu <= d.r_plus);
    CHECK(std::abs(d.g_sn) <= 0.5 * d.gamma);
    // independent edges from an 8x finer integration agree to 1e-9 relative
    LocateOptions lo;
    lo.verify_count = false;
    lo.closed_tol = 0.0;
    OdeOptions fine;
    fine.steps_per_unit = 8 * 2048;
    const BranchPoints b = locate_branch_points(ThirdOrderOperator(w, fine), 3, lo);
    CHECK(d.r_minus == doctest::Approx(b.r_minus).epsilon(1e-9));
    CHECK(d.r_plus == doctest::Approx(b.r_plus).epsilon(1e-9));
}

TEST_CASE("threads do not change the result") {
    const CoefficientPair u = test::random_pair(63, 2, 0.04);
    ForwardOptions one, two;
    two.threads = 2;
    CHECK(forward_map(u, 2, one).values() == forward_map(u, 2, two).values());
}

TEST_CASE("JSON round trip and validation") {
    const SpectralData s = forward_map(test::random_pair(64, 2, 0.03), 2);
    const SpectralData t = spectral_data_from_json(nlohmann::json::parse(to_json(s).dump()));
    CHECK(t.values() == s.values());
    CHECK(t.at(-2).r_plus == s.at(-2).r_plus);

    auto doc = to_json(s);
    doc["data"].erase(doc["data"].begin() + 1);
    CHECK_THROWS_AS(spectral_data_from_json(doc), InputError);
    doc = to_json(s);
    doc["data"][0]["n"] = 0;
    CHECK_THROWS_AS(spectral_data_from_json(doc), InputError);
    doc = to_json(s);
    doc["data"][0]["g_c"] = "x";
    CHECK_THROWS_AS(spectral_data_from_json(doc), InputError);
}

TEST_CASE("Jacobian at zero is well conditioned") {
    InvertOptions io;
    const Eigen::MatrixXd J = forward_jacobian(std::vector<double>(8, 0.0), 2, io);
    REQUIRE(J.rows() == 8);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto sv = svd.singularValues();
    CHECK(sv(0) / sv(sv.size() - 1) < 1e4);
}

TEST_CASE("Newton recovers coefficients") {
    const CoefficientPair u = test::random_pair(65, 2, 0.04);
    const SpectralData target = forward_map(u, 2);
    const InvertResult r = invert_map(target, CoefficientPair{TrigSeries(2), TrigSeries(2)});
    const auto a = pack(r.u, 2), b = pack(u, 2);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-6);
    CHECK(r.residual_history.back() <= 1e-8);
    CHECK(r.iterations <= 10);
}

TEST_CASE("iteration limit reports NoConvergence with its history") {
    const SpectralData target = forward_map(test::random_pair(66, 1, 0.04), 1);
    InvertOptions io;
    io.max_iter = 1;
    io.tol = 1e-14;
    try {
        invert_map(target, CoefficientPair{TrigSeries(1), TrigSeries(1)}, io);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK(e.residual_history.size() >= 1);
        CHECK(e.best_iterate.size() == 4);
        CHECK(e.kind() == "NoConvergence");
        CHECK(e.module() == "spectral_map");
    }
}
