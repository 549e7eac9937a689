#include "bsq/periodic.hpp"

#include "bsq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>

namespace bsq {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigSeries::TrigSeries(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    const std::size_t n = std::max(cos_.size(), sin_.size());
    cos_.resize(n, 0.0);
    sin_.resize(n, 0.0);
}

TrigSeries TrigSeries::cosine(std::size_t harmonic, double amplitude) {
    TrigSeries f(harmonic);
    f.cos_[harmonic - 1] = amplitude;
    return f;
}

TrigSeries TrigSeries::sine(std::size_t harmonic, double amplitude) {
    TrigSeries f(harmonic);
    f.sin_[harmonic - 1] = amplitude;
    return f;
}

double TrigSeries::operator()(double x) const {
    if (cos_.empty()) return 0.0;
    const double phase = x - std::floor(x);
    // e^{2 pi i n x} by repeated multiplication; the error grows like n * eps,
    // negligible for the orders used here.
    const std::complex<double> step = std::polar(1.0, kTwoPi * phase);
    std::complex<double> e = step;
    double acc = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        acc += cos_[k] * e.real() + sin_[k] * e.imag();
        e *= step;
    }
    return acc;
}

TrigSeries TrigSeries::derivative() const {
    TrigSeries d(order());
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const double w = kTwoPi * static_cast<double>(k + 1);
        d.cos_[k] = w * sin_[k];
        d.sin_[k] = -w * cos_[k];
    }
    return d;
}

TrigSeries TrigSeries::reflected() const {
    TrigSeries r = *this;
    for (double& b : r.sin_) b = -b;
    return r;
}

TrigSeries TrigSeries::resized(std::size_t order) const {
    TrigSeries r = *this;
    r.cos_.resize(order, 0.0);
    r.sin_.resize(order, 0.0);
    return r;
}

bool TrigSeries::is_zero() const noexcept {
    auto zero = [](double v) { return v == 0.0; };
    return std::all_of(cos_.begin(), cos_.end(), zero) && std::all_of(sin_.begin(), sin_.end(), zero);
}

double TrigSeries::mean_square() const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) s += cos_[k] * cos_[k] + sin_[k] * sin_[k];
    return 0.5 * s;
}

TrigSeries& TrigSeries::operator+=(const TrigSeries& other) {
    if (other.order() > order()) {
        cos_.resize(other.order(), 0.0);
        sin_.resize(other.order(), 0.0);
    }
    for (std::size_t k = 0; k < other.order(); ++k) {
        cos_[k] += other.cos_[k];
        sin_[k] += other.sin_[k];
    }
    return *this;
}

TrigSeries& TrigSeries::operator*=(double s) {
    for (double& a : cos_) a *= s;
    for (double& b : sin_) b *= s;
    return *this;
}

double evaluate(const TrigSeries& f, double x) { return f(x); }

TrigSeries derivative(const TrigSeries& f) { return f.derivative(); }

double ball_norm(const CoefficientPair& u) {
    return std::sqrt(u.p.derivative().mean_square() + u.q.mean_square());
}

CoefficientPair apply_symmetry(const CoefficientPair& u, Symmetry which) {
    switch (which) {
        case Symmetry::star: return u.star();
        case Symmetry::reflect: return u.reflect();
        case Symmetry::star_reflect: return u.star_reflect();
    }
    return u;
}

bool check_ball(const CoefficientPair& u, const char* where, double radius) {
    const double norm = ball_norm(u);
    if (norm <= radius) return true;
    std::cerr << "warning: " << where << ": ball_norm(u) = " << norm << " exceeds " << radius
              << "; spectral localization is not guaranteed\n";
    return false;
}

std::vector<double> pack(const CoefficientPair& u, std::size_t order) {
    std::vector<double> x;
    x.reserve(4 * order);
    for (const TrigSeries* f : {&u.p, &u.q}) {
        for (std::size_t n = 1; n <= order; ++n) x.push_back(f->a(n));
        for (std::size_t n = 1; n <= order; ++n) x.push_back(f->b(n));
    }
    return x;
}

CoefficientPair unpack(std::span<const double> x, std::size_t order) {
    if (x.size() != 4 * order) throw InputError("unpack: expected 4*order parameters");
    auto series = [&](std::size_t offset) {
        return TrigSeries(std::vector<double>(x.begin() + offset, x.begin() + offset + order),
                          std::vector<double>(x.begin() + offset + order, x.begin() + offset + 2 * order));
    };
    return {series(0), series(2 * order)};
}

TrigSeries series_from_json(const nlohmann::json& doc, const char* name) {
    if (doc.is_null()) return {};
    if (!doc.is_object()) throw InputError(std::string("series '") + name + "' must be an object");
    if (doc.contains("const"))
        throw InputError(std::string("series '") + name + "' has a constant term; only zero-mean input is accepted");
    auto read = [&](const char* key) {
        std::vector<double> v;
        if (!doc.contains(key)) return v;
        const auto& arr = doc.at(key);
        if (!arr.is_array()) throw InputError(std::string(name) + "." + key + " must be an array");
        for (const auto& e : arr) {
            if (!e.is_number()) throw InputError(std::string(name) + "." + key + " must contain numbers");
            v.push_back(e.get<double>());
        }
        return v;
    };
    return {read("cos"), read("sin")};
}

CoefficientPair coefficients_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InputError("coefficient document must be a JSON object");
    if (doc.contains("const")) throw InputError("coefficient document has a constant term");
    CoefficientPair u;
    if (doc.contains("p")) u.p = series_from_json(doc.at("p"), "p");
    if (doc.contains("q")) u.q = series_from_json(doc.at("q"), "q");
    return u;
}

nlohmann::json to_json(const TrigSeries& f) {
    return {{"cos", std::vector<double>(f.cos_coeffs().begin(), f.cos_coeffs().end())},
            {"sin", std::vector<double>(f.sin_coeffs().begin(), f.sin_coeffs().end())}};
}

nlohmann::json to_json(const CoefficientPair& u) { return {{"p", to_json(u.p)}, {"q", to_json(u.q)}}; }

}  // namespace bsq
