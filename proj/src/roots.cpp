#include "bsq/roots.hpp"

#include "bsq/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace bsq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct HintFailed {};

// Maximizer of f inside [a, b] from a sign change of df, widening by
// `grow` up to `tries` times while staying inside [lo, hi].
std::optional<double> peak_in(const std::function<double(double)>& df, double a, double b, double lo, double hi,
                              double grow, int tries) {
    for (int t = 0; t <= tries; ++t) {
        const double da = df(a), db = df(b);
        if (da > 0.0 && db < 0.0) return bracketed_root(df, a, b, da, db);
        if (da == 0.0) return a;
        if (db == 0.0) return b;
        const double w = (b - a) * grow;
        const double c = 0.5 * (a + b);
        a = std::max(lo, c - w);
        b = std::min(hi, c + w);
    }
    return std::nullopt;
}

// Walks outward from `start` (where f > 0) with geometrically growing steps
// until f < 0, then solves for the crossing.
std::optional<double> edge_root(const std::function<Sample(double)>& f, double start, double fstart, double step,
                                double limit) {
    const double dir = limit > start ? 1.0 : -1.0;
    double inner = start, finner = fstart;
    for (int t = 0; t < 40; ++t) {
        double x = start + dir * step;
        if ((x - limit) * dir > 0.0) x = limit;
        const double fx = f(x).value;
        if (fx < 0.0) {
            return dir > 0 ? bracketed_root([&](double s) { return f(s).value; }, inner, x, finner, fx)
                           : bracketed_root([&](double s) { return f(s).value; }, x, inner, fx, finner);
        }
        if (x == limit) return std::nullopt;
        inner = x;
        finner = fx;
        step *= 4.0;
    }
    return std::nullopt;
}

PairLocation finish_pair(const std::function<Sample(double)>& f, double peak, double lo, double hi,
                         double left_guess, double right_guess, const PairSearch& opts) {
    const Sample top = f(peak);
    PairLocation out{peak, peak, peak, top.value, top.scale, false};
    const double tol = opts.closed_tol * top.scale;
    if (top.value <= tol) {
        if (top.value < -tol)
            throw RealnessViolation(std::string(opts.what) + ": no real zeros near the maximizer (value " +
                                        std::to_string(top.value / top.scale) + " of scale)",
                                    opts.module);
        out.closed = true;
        return out;
    }
    const double floor_step = 1e-9 * (std::abs(peak) + 1.0);
    auto lower = edge_root(f, peak, top.value, std::max(peak - left_guess, floor_step), lo);
    auto upper = edge_root(f, peak, top.value, std::max(right_guess - peak, floor_step), hi);
    if (!lower || !upper)
        throw CountMismatch(std::string(opts.what) + ": positive bump does not return below zero inside the domain",
                            opts.module);
    out.lower = *lower;
    out.upper = *upper;
    return out;
}

}  // namespace

double bracketed_root(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw CountMismatch("bracketed_root: no sign change", "roots");
    auto tol = [](double x, double y) { return std::abs(x - y) <= 4.0 * kEps * std::max(std::abs(x), std::abs(y)); };
    std::uintmax_t iters = 200;
    auto [x, y] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (x + y);
}

PairLocation locate_zero_pair(const std::function<Sample(double)>& f, const std::function<double(double)>& df,
                              double lo, double hi, const PairSearch& opts, const std::optional<PairLocation>& hint) {
    if (hint) {
        const double width = std::max(hint->upper - hint->lower, 1e-7 * (std::abs(hint->peak) + 1.0));
        if (auto peak = peak_in(df, std::max(lo, hint->peak - width), std::min(hi, hint->peak + width), lo, hi, 8.0, 3)) {
            try {
                return finish_pair(f, *peak, lo, hi, hint->lower - 0.25 * width, hint->upper + 0.25 * width, opts);
            } catch (const Error&) {
                // fall through to the full scan
            }
        }
    }

    const int panels = std::max(opts.panels, 4);
    std::vector<double> xs(panels + 1), rel(panels + 1);
    for (int k = 0; k <= panels; ++k) {
        xs[k] = lo + (hi - lo) * k / panels;
        const Sample s = f(xs[k]);
        rel[k] = s.value / s.scale;
    }
    const int kmax = static_cast<int>(std::max_element(rel.begin(), rel.end()) - rel.begin());
    if (kmax == 0 || kmax == panels)
        throw CountMismatch(std::string(opts.what) + ": maximum sits on the domain boundary", opts.module);
    auto peak = peak_in(df, xs[kmax - 1], xs[kmax + 1], lo, hi, 1.5, 4);
    if (!peak) throw CountMismatch(std::string(opts.what) + ": could not isolate the maximizer", opts.module);
    int left = kmax, right = kmax;
    while (left > 0 && rel[left] >= 0.0) --left;
    while (right < panels && rel[right] >= 0.0) ++right;
    return finish_pair(f, *peak, lo, hi, xs[left], xs[right], opts);
}

double locate_single_zero(const std::function<double(double)>& f, const std::function<double(double)>& df,
                          double lo, double hi, int panels, const char* module, std::optional<double> hint) {
    if (hint) {
        double w = 1e-6 * (std::abs(*hint) + 1.0);
        for (int t = 0; t < 8; ++t) {
            const double a = std::max(lo, *hint - w), b = std::min(hi, *hint + w);
            const double fa = f(a), fb = f(b);
            if ((fa <= 0) != (fb <= 0) || fa == 0.0 || fb == 0.0) return bracketed_root(f, a, b, fa, fb);
            w *= 8.0;
        }
    }

    panels = std::max(panels, 4);
    std::vector<double> xs(panels + 1), fs(panels + 1);
    for (int k = 0; k <= panels; ++k) {
        xs[k] = lo + (hi - lo) * k / panels;
        fs[k] = f(xs[k]);
    }
    std::vector<int> changes;
    for (int k = 0; k < panels; ++k)
        if ((fs[k] > 0) != (fs[k + 1] > 0)) changes.push_back(k);
    if (changes.size() > 1)
        throw CountMismatch("found " + std::to_string(changes.size()) + " sign changes where one zero is expected",
                            module);
    if (changes.size() == 1) {
        const int k = changes.front();
        return bracketed_root(f, xs[k], xs[k + 1], fs[k], fs[k + 1]);
    }

    // Tangential near-zero: minimize |f| then polish with Newton.
    int kmin = 0;
    for (int k = 1; k <= panels; ++k)
        if (std::abs(fs[k]) < std::abs(fs[kmin])) kmin = k;
    double a = xs[std::max(kmin - 1, 0)], b = xs[std::min(kmin + 1, panels)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = std::abs(f(c)), fd = std::abs(f(d));
    for (int it = 0; it < 80 && (b - a) > 1e-10 * (std::abs(a) + 1.0); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = std::abs(f(c));
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = std::abs(f(d));
        }
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 30; ++it) {
        const double fx = f(x), dfx = df(x);
        if (dfx == 0.0) break;
        const double dx = fx / dfx;
        x -= dx;
        if (std::abs(dx) <= 4.0 * kEps * (std::abs(x) + 1.0)) break;
    }
    const double w = 1e-9 * (std::abs(x) + 1.0);
    const double fa = f(x - w), fb = f(x + w);
    if ((fa > 0) == (fb > 0) && fa != 0.0 && fb != 0.0)
        throw CountMismatch("no zero found in the search interval", module);
    return bracketed_root(f, x - w, x + w, fa, fb);
}

double winding_number(const std::function<std::complex<double>(double)>& f_on_curve, int points) {
    using std::numbers::pi;
    std::vector<std::complex<double>> vals(points + 1);
    for (int k = 0; k < points; ++k) vals[k] = f_on_curve(2.0 * pi * k / points);
    vals[points] = vals[0];

    std::function<double(double, std::complex<double>, double, std::complex<double>, int)> turn =
        [&](double ta, std::complex<double> fa, double tb, std::complex<double> fb, int depth) -> double {
        const double d = std::arg(fb / fa);
        if (std::abs(d) <= pi / 4.0 || depth >= 12) return d;
        const double tm = 0.5 * (ta + tb);
        const std::complex<double> fm = f_on_curve(tm);
        return turn(ta, fa, tm, fm, depth + 1) + turn(tm, fm, tb, fb, depth + 1);
    };

    double total = 0.0;
    for (int k = 0; k < points; ++k)
        total += turn(2.0 * pi * k / points, vals[k], 2.0 * pi * (k + 1) / points, vals[k + 1], 0);
    return total / (2.0 * pi);
}

}  // namespace bsq
