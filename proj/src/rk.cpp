#include "bsq/rk.hpp"

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

namespace bsq {

namespace {

namespace odeint = boost::numeric::odeint;

template <class Row>
void copy_row(std::array<double, Tableau::kStages>& dst, const Row& src) {
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j];
}

Tableau make_fehlberg78() {
    Tableau t{};
    t.order = 8;
    copy_row(t.c, odeint::rk78_coefficients_c<double>());
    copy_row(t.b, odeint::rk78_coefficients_b<double>());
    copy_row(t.a[1], odeint::rk78_coefficients_a1<double>());
    copy_row(t.a[2], odeint::rk78_coefficients_a2<double>());
    copy_row(t.a[3], odeint::rk78_coefficients_a3<double>());
    copy_row(t.a[4], odeint::rk78_coefficients_a4<double>());
    copy_row(t.a[5], odeint::rk78_coefficients_a5<double>());
    copy_row(t.a[6], odeint::rk78_coefficients_a6<double>());
    copy_row(t.a[7], odeint::rk78_coefficients_a7<double>());
    copy_row(t.a[8], odeint::rk78_coefficients_a8<double>());
    copy_row(t.a[9], odeint::rk78_coefficients_a9<double>());
    copy_row(t.a[10], odeint::rk78_coefficients_a10<double>());
    copy_row(t.a[11], odeint::rk78_coefficients_a11<double>());
    copy_row(t.a[12], odeint::rk78_coefficients_a12<double>());
    return t;
}

}  // namespace

const Tableau& fehlberg78() {
    static const Tableau tab = make_fehlberg78();
    return tab;
}

}  // namespace bsq
