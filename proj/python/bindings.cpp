#include "bsq/errors.hpp"
#include "bsq/floquet.hpp"
#include "bsq/flow.hpp"
#include "bsq/hill.hpp"
#include "bsq/spectral_map.hpp"
#include "bsq/three_point.hpp"
#include "bsq/verify.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace bsq;

namespace {

CoefficientPair pair_of(const TrigSeries& p, const TrigSeries& q) { return {p, q}; }

py::dict as_dict(const BranchPoints& b) {
    py::dict d;
    d["n"] = b.n;
    d["r_minus"] = b.r_minus;
    d["r_plus"] = b.r_plus;
    d["closed"] = b.closed;
    d["contour_count"] = b.contour_count;
    return d;
}

}  // namespace

PYBIND11_MODULE(_bsqspec, m) {
    m.doc() = "Spectral data of y''' + (p y)' + p y' + q y = lambda y on the circle";

    auto base = py::register_exception<Error>(m, "BsqError", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<CountMismatch>(m, "CountMismatch", base.ptr());
    py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
    py::register_exception<BlowUp>(m, "BlowUp", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    py::class_<TrigSeries>(m, "TrigSeries")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("cos"), py::arg("sin") = std::vector<double>{})
        .def_property_readonly("cos", [](const TrigSeries& f) { return std::vector<double>(f.cos_coeffs().begin(), f.cos_coeffs().end()); })
        .def_property_readonly("sin", [](const TrigSeries& f) { return std::vector<double>(f.sin_coeffs().begin(), f.sin_coeffs().end()); })
        .def("__call__", [](const TrigSeries& f, double x) { return f(x); })
        .def("derivative", &TrigSeries::derivative)
        .def_property_readonly("order", &TrigSeries::order);

    m.def("ball_norm", [](const TrigSeries& p, const TrigSeries& q) { return ball_norm(pair_of(p, q)); }, py::arg("p"),
          py::arg("q"));

    m.def(
        "monodromy",
        [](const TrigSeries& p, const TrigSeries& q, std::complex<double> lambda) {
            const Monodromy3 mono = monodromy3(pair_of(p, q), lambda);
            return py::make_tuple(Eigen::Matrix3cd(mono.M), mono.det());
        },
        py::arg("p"), py::arg("q"), py::arg("lam"), "Monodromy matrix (rows are solutions) and its determinant.");

    m.def(
        "discriminant",
        [](const TrigSeries& p, const TrigSeries& q, std::complex<double> lambda) {
            return discriminant(pair_of(p, q), lambda).rho;
        },
        py::arg("p"), py::arg("q"), py::arg("lam"));

    m.def(
        "branch_points",
        [](const TrigSeries& p, const TrigSeries& q, int n, bool verify_count) {
            LocateOptions lo;
            lo.verify_count = verify_count;
            return as_dict(n == 0 ? locate_r0(pair_of(p, q), lo) : locate_branch_points(pair_of(p, q), n, lo));
        },
        py::arg("p"), py::arg("q"), py::arg("n"), py::arg("verify_count") = true);

    m.def(
        "three_point_eigenvalue",
        [](const TrigSeries& p, const TrigSeries& q, int n) {
            const ThreePointEigen e = locate_mu(pair_of(p, q), n);
            return py::make_tuple(e.mu, e.y1_prime);
        },
        py::arg("p"), py::arg("q"), py::arg("n"), "(mu_n, y_n'(1)) with y_n'(0) = 1.");

    m.def(
        "hill_spectra",
        [](const TrigSeries& p, const TrigSeries& q, int n) {
            const HillSpectra h = hill_spectra(pair_of(p, q), n);
            py::dict d;
            d["E_minus"] = h.E_minus;
            d["E_plus"] = h.E_plus;
            d["closed"] = h.closed;
            d["dirichlet"] = h.gm;
            d["phi1_prime"] = h.phi1_prime;
            return d;
        },
        py::arg("p"), py::arg("q"), py::arg("n"));

    m.def(
        "forward_map",
        [](const TrigSeries& p, const TrigSeries& q, int n_max, int threads) {
            ForwardOptions fo;
            fo.threads = threads;
            return to_json(forward_map(pair_of(p, q), n_max, fo)).dump();
        },
        py::arg("p"), py::arg("q"), py::arg("n_max"), py::arg("threads") = 1,
        "Spectral data as a JSON string.");

    m.def(
        "invert_map",
        [](const std::string& spectral_json, double tol, int max_iter, int threads) {
            const SpectralData target = spectral_data_from_json(nlohmann::json::parse(spectral_json));
            InvertOptions io;
            io.tol = tol;
            io.max_iter = max_iter;
            io.threads = threads;
            const InvertResult r =
                invert_map(target, CoefficientPair{TrigSeries(target.n_max), TrigSeries(target.n_max)}, io);
            return py::make_tuple(r.u.p, r.u.q, r.residual_history);
        },
        py::arg("spectral_json"), py::arg("tol") = 1e-8, py::arg("max_iter") = 30, py::arg("threads") = 1);

    m.def(
        "evolve",
        [](const TrigSeries& p, const TrigSeries& q, int modes, double dt, double t_end) {
            const auto traj = evolve(make_flow_state(pair_of(p, q), modes), dt, t_end);
            return py::make_tuple(traj.back().p, traj.back().q);
        },
        py::arg("p"), py::arg("q"), py::arg("modes"), py::arg("dt"), py::arg("t_end"));

    m.def(
        "verify",
        [](const TrigSeries& p, const TrigSeries& q, int n_max, int hill_n_max) {
            VerifyOptions vo;
            vo.n_max = n_max;
            vo.hill_n_max = hill_n_max;
            return to_json(verify_identities(pair_of(p, q), vo)).dump();
        },
        py::arg("p"), py::arg("q"), py::arg("n_max") = 1, py::arg("hill_n_max") = 1,
        "Identity-suite report as a JSON string.");
}
