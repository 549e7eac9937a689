#pragma once

#include "json.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace bsq {

/// Real 1-periodic zero-mean function stored as a finite trigonometric sum
///
///     f(x) = sum_{n=1..N} a_n cos(2 pi n x) + b_n sin(2 pi n x)
///
/// There is no constant term, so every value of this type has zero mean
/// over a period. Both coefficient vectors always have length N.
class TrigSeries {
public:
    TrigSeries() = default;
    explicit TrigSeries(std::size_t order) : cos_(order, 0.0), sin_(order, 0.0) {}
    TrigSeries(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

    static TrigSeries cosine(std::size_t harmonic, double amplitude);
    static TrigSeries sine(std::size_t harmonic, double amplitude);

    std::size_t order() const noexcept { return cos_.size(); }
    std::span<const double> cos_coeffs() const noexcept { return cos_; }
    std::span<const double> sin_coeffs() const noexcept { return sin_; }
    /// Coefficient of cos(2 pi n x); zero when n exceeds the order.
    double a(std::size_t n) const noexcept { return n >= 1 && n <= cos_.size() ? cos_[n - 1] : 0.0; }
    double b(std::size_t n) const noexcept { return n >= 1 && n <= sin_.size() ? sin_[n - 1] : 0.0; }

    double operator()(double x) const;
    TrigSeries derivative() const;
    /// x -> f(1 - x)
    TrigSeries reflected() const;
    TrigSeries resized(std::size_t order) const;
    bool is_zero() const noexcept;

    /// Integral of f^2 over one period (Parseval).
    double mean_square() const noexcept;

    TrigSeries& operator+=(const TrigSeries& other);
    TrigSeries& operator*=(double s);
    friend TrigSeries operator+(TrigSeries lhs, const TrigSeries& rhs) { return lhs += rhs; }
    friend TrigSeries operator*(double s, TrigSeries f) { return f *= s; }
    friend TrigSeries operator-(const TrigSeries& f) { return -1.0 * f; }
    friend bool operator==(const TrigSeries&, const TrigSeries&) = default;

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

double evaluate(const TrigSeries& f, double x);
TrigSeries derivative(const TrigSeries& f);

enum class Symmetry { star, reflect, star_reflect };

/// Coefficient pair u = (p, q); p plays the role of the H1 component.
struct CoefficientPair {
    TrigSeries p;
    TrigSeries q;

    std::size_t order() const noexcept { return std::max(p.order(), q.order()); }
    bool is_zero() const noexcept { return p.is_zero() && q.is_zero(); }

    /// (p, -q)
    CoefficientPair star() const { return {p, -q}; }
    /// x -> u(1 - x)
    CoefficientPair reflect() const { return {p.reflected(), q.reflected()}; }
    CoefficientPair star_reflect() const { return star().reflect(); }

    friend bool operator==(const CoefficientPair&, const CoefficientPair&) = default;
};

/// sqrt( int_0^1 |p'|^2 + |q|^2 dx ), exact from the coefficients.
double ball_norm(const CoefficientPair& u);
CoefficientPair apply_symmetry(const CoefficientPair& u, Symmetry which);

/// Radius of the small ball in which the spectral results are expected to
/// hold. Exceeding it only triggers a warning.
inline constexpr double kDefaultBallRadius = 0.1;

/// Emits a one-line warning on stderr when ball_norm(u) exceeds `radius`.
/// Returns true when u is inside.
bool check_ball(const CoefficientPair& u, const char* where, double radius = kDefaultBallRadius);

/// Flat parameter vector used by the inverse solver:
/// [p.cos(1..N), p.sin(1..N), q.cos(1..N), q.sin(1..N)].
std::vector<double> pack(const CoefficientPair& u, std::size_t order);
CoefficientPair unpack(std::span<const double> x, std::size_t order);

// JSON coefficient document: {"p": {"cos": [...], "sin": [...]}, "q": {...}}.
// Missing arrays mean zero. A "const" member anywhere is rejected.
CoefficientPair coefficients_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CoefficientPair& u);
nlohmann::json to_json(const TrigSeries& f);
TrigSeries series_from_json(const nlohmann::json& doc, const char* name);

}  // namespace bsq
