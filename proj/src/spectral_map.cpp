#include "bsq/spectral_map.hpp"

#include "bsq/hill.hpp"
#include "bsq/parallel.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <set>

namespace bsq {

namespace {

double two_thirds_power(double x) {
    const double c = std::cbrt(x);
    return c * c;
}

}  // namespace

const GapDatum& SpectralData::at(int n) const {
    for (const auto& d : data)
        if (d.n == n) return d;
    throw InputError("spectral data has no component n = " + std::to_string(n), "spectral_map");
}

std::vector<double> SpectralData::values() const {
    std::vector<double> out;
    out.reserve(4 * static_cast<std::size_t>(n_max));
    for (int k = 1; k <= n_max; ++k)
        for (int n : {k, -k}) {
            const GapDatum& d = at(n);
            out.push_back(d.g_cn);
            out.push_back(d.g_sn);
        }
    return out;
}

GapDatum gap_datum(const CoefficientPair& w, int n, const ForwardOptions& opts, const GapDatum* hint) {
    if (n < 1) throw InputError("gap_datum expects n >= 1", "spectral_map");
    const ThirdOrderOperator op(w, opts.ode);
    const ThirdOrderOperator op_star(w.star(), opts.ode);

    LocateOptions lo;
    lo.verify_count = opts.verify_counts;
    MuOptions mo;
    mo.verify_count = opts.verify_counts;
    if (hint) {
        lo.hint = hint->pipeline_branch;
        mo.hint = -hint->mu;
    }
    BranchPoints bp = locate_branch_points(op, n, lo);
    const ThreePointEigen e = locate_mu(op_star, -n, mo);

    const double lambda = -e.mu;
    // Narrow gaps have a tiny bump, so their edges feel the truncation error of
    // the integrator; they are redone at four times the step count. -mu lies in
    // [r-, r+], so a double point it sits measurably away from is really a
    // narrow open gap below the closed-gap threshold.
    const bool contradicted = bp.r_minus == bp.r_plus && std::abs(lambda - bp.peak) > 1e-9 * std::abs(lambda);
    if (bp.closed && (bp.r_minus != bp.r_plus || contradicted)) {
        OdeOptions fine = opts.ode;
        fine.steps_per_unit *= 4;
        LocateOptions again = lo;
        again.verify_count = false;
        again.hint = bp;
        if (contradicted) again.closed_tol = 0.0;
        try {
            bp = locate_branch_points(ThirdOrderOperator(w, fine), n, again);
        } catch (const Error&) {
            // bump not positive: keep the double point
        }
    }
    if (!(lambda > 1.0))
        throw NonRealData("-mu_{-" + std::to_string(n) + "}(u*) = " + std::to_string(lambda) + " is not above 1");
    const cplx tau = select_tau(op, lambda);
    if (std::abs(tau.imag()) > 1e-8 * std::abs(tau) || !(tau.real() > 0.0))
        throw NonRealData("tau at -mu_{-" + std::to_string(n) + "}(u*) is not real positive");
    if (!(bp.r_minus > 0.0)) throw NonRealData("branch point r_" + std::to_string(n) + "^- is not positive");

    GapDatum d;
    d.n = n;
    d.r_minus = bp.r_minus;
    d.r_plus = bp.r_plus;
    d.closed = bp.closed;
    d.mu = lambda;
    d.y1_prime = e.y1_prime;
    d.tau = tau.real();
    d.pipeline_branch = bp;

    const double rp = two_thirds_power(bp.r_plus), rm = two_thirds_power(bp.r_minus);
    d.g_cn = 0.75 * (0.5 * (rp + rm) - two_thirds_power(lambda));
    d.gamma = 0.75 * (rp - rm);
    d.h_sn = std::log(std::abs(e.y1_prime / std::sqrt(d.tau)));
    d.g_sn = std::sqrt(std::abs(0.25 * d.gamma * d.gamma - d.g_cn * d.g_cn)) * dead_zone_sign(d.h_sn);
    return d;
}

SpectralData forward_map(const CoefficientPair& u, int n_max, const ForwardOptions& opts) {
    if (n_max < 1) throw InputError("n_max must be at least 1", "spectral_map");
    const CoefficientPair mirrored = apply_symmetry(u, Symmetry::star_reflect);
    const bool use_hint = opts.hint && opts.hint->n_max == n_max;

    std::vector<GapDatum> raw(2 * static_cast<std::size_t>(n_max));
    ForwardOptions inner = opts;
    inner.threads = 1;
    parallel_for(raw.size(), opts.threads, [&](std::size_t i) {
        const int n = static_cast<int>(i / 2) + 1;
        const bool neg = i % 2 == 1;
        const GapDatum* hint = use_hint ? &opts.hint->at(neg ? -n : n) : nullptr;
        raw[i] = gap_datum(neg ? mirrored : u, n, inner, hint);
    });

    SpectralData out;
    out.n_max = n_max;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        GapDatum d = raw[i];
        if (i % 2 == 1) {
            d.n = -d.n;
            std::swap(d.r_minus, d.r_plus);
            d.r_minus = -d.r_minus;
            d.r_plus = -d.r_plus;
        }
        out.data.push_back(d);
    }
    return out;
}

namespace {

std::vector<double> residual(const std::vector<double>& x, int n_max, const std::vector<double>& target,
                             const InvertOptions& opts, const SpectralData* hint, SpectralData* keep = nullptr) {
    ForwardOptions fo;
    fo.threads = opts.threads;
    fo.ode = opts.ode;
    fo.hint = hint;
    SpectralData s = forward_map(unpack(x, n_max), n_max, fo);
    std::vector<double> r = s.values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= target[i];
    if (keep) *keep = std::move(s);
    return r;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Eigen::MatrixXd forward_jacobian(const std::vector<double>& x, int n_max, const InvertOptions& opts,
                                 const SpectralData* hint) {
    const std::size_t dim = x.size();
    Eigen::MatrixXd J(4 * n_max, dim);
    InvertOptions inner = opts;
    inner.threads = 1;
    const std::vector<double> zero(4 * static_cast<std::size_t>(n_max), 0.0);
    parallel_for(dim, opts.threads, [&](std::size_t j) {
        const double h = std::max(opts.rel_step * std::abs(x[j]), opts.min_step);
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const auto fp = residual(xp, n_max, zero, inner, hint);
        const auto fm = residual(xm, n_max, zero, inner, hint);
        for (std::size_t i = 0; i < fp.size(); ++i) J(static_cast<Eigen::Index>(i), j) = (fp[i] - fm[i]) / (2.0 * h);
    });
    return J;
}

InvertResult invert_map(const SpectralData& target, const CoefficientPair& u0, const InvertOptions& opts) {
    const int N = target.n_max;
    if (N < 1) throw InputError("target spectral data is empty", "spectral_map");
    const std::vector<double> t = target.values();
    std::vector<double> x = pack(u0, N);

    InvertResult out;
    SpectralData current;
    std::vector<double> r = residual(x, N, t, opts, nullptr, &current);
    double rn = norm2(r);
    std::vector<double> best = x;
    double best_norm = rn;

    for (int it = 0;; ++it) {
        out.residual_history.push_back(rn);
        if (rn <= opts.tol) {
            out.u = unpack(x, N);
            out.iterations = it;
            return out;
        }
        if (it >= opts.max_iter)
            throw NoConvergence("no convergence after " + std::to_string(opts.max_iter) + " iterations (residual " +
                                    sci(best_norm) + ")",
                                out.residual_history, out.condition_estimate, best);

        const Eigen::MatrixXd J = forward_jacobian(x, N, opts, &current);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        out.condition_estimate = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        if (!(out.condition_estimate <= opts.max_condition))
            throw JacobianSingular("Jacobian condition estimate " + sci(out.condition_estimate) + " exceeds " +
                                   sci(opts.max_condition));
        const Eigen::VectorXd step = -svd.solve(Eigen::Map<const Eigen::VectorXd>(r.data(), r.size()));

        // Armijo backtracking on ||F||_2.
        bool accepted = false;
        for (double s = 1.0; s >= std::ldexp(1.0, -10); s *= 0.5) {
            std::vector<double> xn = x;
            for (std::size_t i = 0; i < xn.size(); ++i) xn[i] += s * step(static_cast<Eigen::Index>(i));
            SpectralData trial;
            std::vector<double> rt;
            try {
                rt = residual(xn, N, t, opts, &current, &trial);
            } catch (const Error&) {
                continue;
            }
            const double tn = norm2(rt);
            if (tn <= (1.0 - 1e-4 * s) * rn) {
                x = std::move(xn);
                r = std::move(rt);
                rn = tn;
                current = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NoConvergence("line search could not reduce the residual " + sci(rn),
                                out.residual_history, out.condition_estimate, best);
        if (rn < best_norm) {
            best_norm = rn;
            best = x;
        }
    }
}

nlohmann::json to_json(const SpectralData& s) {
    nlohmann::json data = nlohmann::json::array();
    for (const auto& d : s.data)
        data.push_back({{"n", d.n}, {"g_c", d.g_cn}, {"g_s", d.g_sn}, {"r_minus", d.r_minus},
                        {"r_plus", d.r_plus}, {"mu_star", d.mu}});
    return {{"n_max", s.n_max}, {"data", data}};
}

SpectralData spectral_data_from_json(const nlohmann::json& doc) {
    auto fail = [](const std::string& msg) { return InputError("spectral data: " + msg, "spectral_map"); };
    if (!doc.is_object()) throw fail("document must be an object");
    if (!doc.contains("n_max") || !doc["n_max"].is_number_integer()) throw fail("\"n_max\" must be an integer");
    SpectralData s;
    s.n_max = doc["n_max"].get<int>();
    if (s.n_max < 1) throw fail("\"n_max\" must be at least 1");
    if (!doc.contains("data") || !doc["data"].is_array()) throw fail("\"data\" must be an array");
    std::set<int> seen;
    for (const auto& e : doc["data"]) {
        if (!e.is_object()) throw fail("entries of \"data\" must be objects");
        for (const char* key : {"n", "g_c", "g_s"})
            if (!e.contains(key) || !e[key].is_number()) throw fail(std::string("entry lacks numeric \"") + key + "\"");
        if (!e["n"].is_number_integer()) throw fail("\"n\" must be an integer");
        GapDatum d;
        d.n = e["n"].get<int>();
        if (d.n == 0 || std::abs(d.n) > s.n_max) throw fail("index n = " + std::to_string(d.n) + " out of range");
        if (!seen.insert(d.n).second) throw fail("index n = " + std::to_string(d.n) + " repeated");
        d.g_cn = e["g_c"].get<double>();
        d.g_sn = e["g_s"].get<double>();
        auto opt = [&](const char* key, double& dst) {
            if (e.contains(key)) {
                if (!e[key].is_number()) throw fail(std::string("\"") + key + "\" must be a number");
                dst = e[key].get<double>();
            }
        };
        opt("r_minus", d.r_minus);
        opt("r_plus", d.r_plus);
        opt("mu_star", d.mu);
        s.data.push_back(d);
    }
    if (static_cast<int>(seen.size()) != 2 * s.n_max) throw fail("indices must cover +-1..+-n_max");
    std::sort(s.data.begin(), s.data.end(), [](const GapDatum& a, const GapDatum& b) {
        return std::abs(a.n) != std::abs(b.n) ? std::abs(a.n) < std::abs(b.n) : a.n > b.n;
    });
    return s;
}

}  // namespace bsq
