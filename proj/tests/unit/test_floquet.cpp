#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsq/errors.hpp"
#include "bsq/floquet.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace bsq;
using cplx = std::complex<double>;
using std::numbers::pi;

TEST_CASE("principal cube root") {
    CHECK(std::abs(cube_root(8.0) - 2.0) < 1e-15);
    CHECK(std::abs(cube_root(-8.0) - std::polar(2.0, pi / 3)) < 1e-14);
    CHECK(std::abs(cube_root(cplx(-8.0, -0.0)) - std::polar(2.0, pi / 3)) < 1e-14);
    const cplx z(3.0, -4.0);
    CHECK(std::abs(std::pow(cube_root(z), 3) - z) < 1e-13);
}

TEST_CASE("spectral domains") {
    for (int n : {1, 2, 5}) {
        const SpectralDomain D{n}, Dm{-n};
        CHECK(D.contains(D.center()));
        CHECK(D.center() == doctest::Approx(test::free_center(n)));
        CHECK(Dm.contains(-D.center()));
        CHECK_FALSE(D.contains(-D.center()));
        CHECK(D.contains(0.5 * (D.real_lo() + D.real_hi())));
        CHECK_FALSE(D.contains(D.real_lo() * (1 - 1e-9)));
        CHECK(std::abs(D.boundary(0.0) - D.real_hi()) < 1e-9 * D.real_hi());
        CHECK(std::abs(Dm.real_lo() + D.real_hi()) < 1e-9 * D.real_hi());
        // neighbouring domains do not overlap on the real axis
        CHECK(SpectralDomain{n + 1}.real_lo() > D.real_hi());
    }
    CHECK(SpectralDomain{0}.contains(0.0));
}

TEST_CASE("discriminant of a matrix with known multipliers") {
    // M = diag(4, 1/2, 1/2) has a double multiplier, so rho = 0.
    Monodromy3 m;
    m.lambda = 1.0;
    m.M = Mat3::Zero();
    m.M.diagonal() << 4.0, 0.5, 0.5;
    m.compound = Mat3::Zero();
    m.compound.diagonal() << 2.0, 2.0, 0.25;
    m.determinant = 1.0;
    CHECK(std::abs(discriminant(m).rho) < 1e-13);

    // distinct multipliers: rho is the product of squared differences
    m.M.diagonal() << 4.0, 2.0, 0.125;
    m.compound.diagonal() << 8.0, 0.5, 0.25;
    const double expect = std::pow((4.0 - 2.0) * (4.0 - 0.125) * (2.0 - 0.125), 2);
    CHECK(discriminant(m).rho.real() == doctest::Approx(expect).epsilon(1e-13));

    auto t = floquet_multipliers(m);
    std::sort(t.begin(), t.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    CHECK(std::abs(t[0] - 0.125) < 1e-14);
    CHECK(std::abs(t[2] - 4.0) < 1e-13);
}

TEST_CASE("multipliers satisfy Vieta for a random operator") {
    const ThirdOrderOperator op(test::random_pair(31, 3, 0.05));
    const Monodromy3 m = monodromy3(op, cplx(30.0, 5.0));
    const auto t = floquet_multipliers(m);
    CHECK(std::abs(t[0] * t[1] * t[2] - 1.0) < 1e-9);
    CHECK(std::abs(t[0] + t[1] + t[2] - m.trace()) < 1e-10 * std::abs(m.trace()));
}

TEST_CASE("distinguished multiplier") {
    const CoefficientPair zero{TrigSeries(1), TrigSeries(1)};
    for (double l : {2.0, 50.0, 300.0}) {
        const cplx t = select_tau(zero, l);
        CHECK(std::abs(t - std::exp(std::cbrt(l))) < 1e-10 * std::exp(std::cbrt(l)));
    }
    const CoefficientPair u = test::random_pair(32, 2, 0.05);
    const cplx t = select_tau(u, 100.0);
    CHECK(t.real() > 0.0);
    CHECK(std::abs(t.imag()) < 1e-12 * t.real());
    CHECK(std::abs(t / std::exp(std::cbrt(100.0)) - 1.0) < 0.1);
    CHECK_THROWS_AS(select_tau(u, 0.5), DomainError);
    CHECK_THROWS_AS(select_tau(u, std::polar(10.0, 0.8 * pi)), DomainError);
    CHECK(in_tau_domain(std::polar(10.0, 0.7 * pi)));
}

TEST_CASE("free branch points sit at the domain centres") {
    const CoefficientPair zero{TrigSeries(1), TrigSeries(1)};
    for (int n : {1, -1, 3, -4}) {
        const BranchPoints b = locate_branch_points(zero, n);
        CHECK(b.closed);
        CHECK(std::abs(b.r_minus - test::free_center(n)) < 1e-10 * std::abs(test::free_center(n)));
        CHECK(std::abs(b.r_plus - test::free_center(n)) < 1e-10 * std::abs(test::free_center(n)));
        CHECK(b.contour_count == doctest::Approx(2.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(locate_branch_points(zero, 0), InputError);
}

TEST_CASE("branch points are sign changes of rho") {
    const ThirdOrderOperator op(test::random_pair(33, 2, 0.05));
    for (int n : {1, -1, 2}) {
        const BranchPoints b = locate_branch_points(op, n);
        REQUIRE_FALSE(b.closed);
        CHECK(SpectralDomain{n}.contains(b.r_minus));
        CHECK(SpectralDomain{n}.contains(b.r_plus));
        const double w = b.r_plus - b.r_minus;
        const double d = 0.01 * w;
        // rho <= 0 outside the pair, > 0 inside
        CHECK(discriminant(op, b.r_minus - d).rho.real() < 0.0);
        CHECK(discriminant(op, b.r_plus + d).rho.real() < 0.0);
        CHECK(discriminant(op, 0.5 * (b.r_minus + b.r_plus)).rho.real() > 0.0);
    }
}

TEST_CASE("collision factor has the sign of rho") {
    const ThirdOrderOperator op(test::random_pair(34, 2, 0.05));
    const BranchPoints b = locate_branch_points(op, 1);
    for (double s : {-0.5, 0.25, 0.5, 0.75, 1.5}) {
        const double l = b.r_minus + s * (b.r_plus - b.r_minus);
        const Sample k = collision_factor(monodromy3(op, l));
        const double rho = discriminant(op, l).rho.real();
        CHECK((k.value > 0) == (rho > 0));
    }
}

TEST_CASE("hints reproduce the cold search") {
    const ThirdOrderOperator op(test::random_pair(35, 2, 0.05));
    LocateOptions lo;
    lo.verify_count = false;
    const BranchPoints cold = locate_branch_points(op, 2, lo);
    lo.hint = cold;
    const BranchPoints warm = locate_branch_points(ThirdOrderOperator(test::random_pair(35, 2, 0.0501)), 2, lo);
    const BranchPoints ref = locate_branch_points(ThirdOrderOperator(test::random_pair(35, 2, 0.0501)), 2,
                                                  LocateOptions{.verify_count = false});
    CHECK(warm.r_minus == doctest::Approx(ref.r_minus).epsilon(1e-10));
    CHECK(warm.r_plus == doctest::Approx(ref.r_plus).epsilon(1e-10));
}

TEST_CASE("r_0 pair and counts") {
    const ThirdOrderOperator op(test::random_pair(36, 2, 0.04));
    const BranchPoints r0 = locate_r0(op);
    CHECK(r0.r_minus <= r0.r_plus);
    CHECK(SpectralDomain{0}.contains(r0.r_minus));
    CHECK(count_rho_zeros(op, 0) == doctest::Approx(2.0).epsilon(1e-6));
    // polynomial with two roots inside D_1 and one outside
    const double w = count_zeros_in_domain([](cplx l) { return (l - 40.0) * (l - 50.0) * (l - 400.0); },
                                           SpectralDomain{1}, 256);
    CHECK(w == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("rho CSV layout") {
    const ThirdOrderOperator op(test::random_pair(37, 1, 0.02));
    std::ostringstream out;
    write_rho_csv(out, op, 10.0, 20.0, 3);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "lambda,rho,rho_over_scale");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}
