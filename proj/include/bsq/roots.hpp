#pragma once

#include <complex>
#include <functional>
#include <optional>

namespace bsq {

/// A sampled value together with the magnitude of the terms it was
/// assembled from; value/scale is the relative size above round-off.
struct Sample {
    double value;
    double scale;
};

/// Result of locating a pair of real zeros that bound a positive bump.
struct PairLocation {
    double lower;
    double upper;
    double peak;        // maximizer of f between the zeros
    double peak_value;  // f(peak)
    double peak_scale;
    bool closed;  // f(peak) indistinguishable from zero; lower == upper == peak
};

struct PairSearch {
    int panels = 64;
    /// f(peak) <= closed_tol * scale(peak) counts as a double zero.
    double closed_tol = 1e-13;
    const char* module = "floquet_surface";
    const char* what = "zero pair";
};

/// Finds the two real zeros in (lo, hi) of a function that is negative near
/// both ends and has a single positive bump (or touches zero) in between.
/// `df` is the derivative of f.value. With `hint`, the search starts from a
/// previous location and falls back to the full scan when it cannot
/// confirm the brackets.
PairLocation locate_zero_pair(const std::function<Sample(double)>& f, const std::function<double(double)>& df,
                              double lo, double hi, const PairSearch& opts,
                              const std::optional<PairLocation>& hint = std::nullopt);

/// Single real zero in (lo, hi) detected as a sign change on `panels`
/// panels. Throws CountMismatch if the scan shows more than one. When no
/// sign change is seen, minimizes |f| and polishes with Newton using df.
double locate_single_zero(const std::function<double(double)>& f, const std::function<double(double)>& df,
                          double lo, double hi, int panels, const char* module,
                          std::optional<double> hint = std::nullopt);

/// Bracketed root to full double precision (TOMS 748). Requires
/// f(a) and f(b) of opposite sign.
double bracketed_root(const std::function<double(double)>& f, double a, double b, double fa, double fb);

/// Net number of turns of f around 0 along a closed curve parametrized by
/// theta in [0, 2 pi). Segments whose phase jump exceeds pi/4 are refined.
double winding_number(const std::function<std::complex<double>(double)>& f_on_curve, int points);

}  // namespace bsq
