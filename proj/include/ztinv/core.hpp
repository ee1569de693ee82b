#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ztinv {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Error taxonomy shared by all modules.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or precondition violation (bad N, m, annulus, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A transform could not be evaluated at a requested point (singularity,
/// non-finite intermediate, log of zero, ...).
class EvalError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// TransformEvaluator: anything mapping a complex point z to X(z).
// Expression ASTs (via an adapter) and plain closures both satisfy it.
// ---------------------------------------------------------------------------

template <typename F>
concept TransformEvaluator = requires(const F& f, Complex z) {
    { f(z) } -> std::convertible_to<Complex>;
};

/// Evaluate X(z) and reject non-finite results. Closures are not obliged to
/// police themselves, so every inversion method funnels through this.
template <TransformEvaluator F>
Complex checked_eval(const F& x, Complex z) {
    const Complex v = x(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw EvalError("transform evaluation returned a non-finite value at z = ("
                        + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    }
    return v;
}

// ---------------------------------------------------------------------------
// SplitMix64: fixed, tiny generator so that sample draws are bit-identical
// across platforms and standard libraries. Statistical quality is more than
// enough for scattering sample points over an annulus.
// ---------------------------------------------------------------------------

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Shared result and configuration types.
// ---------------------------------------------------------------------------

enum class Method { lsq, dft, quad };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::lsq: return "lsq";
        case Method::dft: return "dft";
        case Method::quad: return "quad";
    }
    return "?";
}

/// Estimated signal samples x~[0..N-1] with per-method diagnostics.
/// Only the real part of the recovered samples is kept; how much imaginary
/// mass was discarded is reported in imag_leakage.
struct SignalEstimate {
    std::vector<double> samples;
    Method method = Method::dft;
    std::optional<double> residual_norm;      // lsq
    std::optional<double> imag_leakage;       // dft, quad
    std::optional<double> condition_estimate; // lsq
    std::vector<int> refinement_counts;       // quad: doublings per sample
    std::vector<std::size_t> unconverged;     // quad: samples that hit max_refinements
};

struct InversionConfig {
    int n_samples = 1024;       // N, truncation length
    int point_count = 0;        // m; 0 selects the default ceil(1.1*(N+1))
    double annulus_min = 1.05;  // sample annulus, must stay outside the unit circle
    double annulus_max = 2.0;
    double contour_radius = 1.0;
    double quad_tol = 1e-10;
    std::uint64_t rng_seed = 42;

    void validate() const {
        if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
        if (annulus_min <= 1.0)
            throw ConfigError("annulus_min must exceed 1: sample points on or inside "
                              "the unit circle make the least-squares system ill-conditioned");
        if (annulus_max <= annulus_min) throw ConfigError("annulus_max must exceed annulus_min");
        if (contour_radius <= 0.0) throw ConfigError("contour_radius must be positive");
        if (quad_tol <= 0.0) throw ConfigError("quad_tol must be positive");
    }
};

inline int default_point_count(int n_samples) {
    return static_cast<int>(std::ceil(1.1 * (n_samples + 1)));
}

/// Asymptotic model x[n] ~ A * a^n set by the farthest (simple) pole.
struct DominantPoleModel {
    double amplitude = 0.0;   // A
    double pole_radius = 0.0; // a, |a| < 1
};

// ---------------------------------------------------------------------------
// Pole scaling: Z{a^n x[n]} = X(z/a). Mapping poles into the unit circle
// makes a non-summable signal invertible; the price is the a^-n blow-up when
// undoing the scale, which unscale_signal reports instead of hiding.
// ---------------------------------------------------------------------------

template <TransformEvaluator F>
auto scale_transform(F x, double a) {
    if (a == 0.0 || std::abs(a) >= 1.0)
        throw ConfigError("scale factor must satisfy 0 < |a| < 1");
    return [x = std::move(x), a](Complex z) -> Complex { return x(z / a); };
}

struct UnscaledSignal {
    std::vector<double> samples; // x[n] = a^-n * y[n]
    bool overflow = false;       // set when a^-n * y[n] left the representable range
};

inline UnscaledSignal unscale_signal(const std::vector<double>& y, double a) {
    if (a == 0.0 || std::abs(a) >= 1.0)
        throw ConfigError("scale factor must satisfy 0 < |a| < 1");
    UnscaledSignal out;
    out.samples.resize(y.size());
    double factor = 1.0;
    const double inv = 1.0 / a;
    for (std::size_t n = 0; n < y.size(); ++n) {
        out.samples[n] = (y[n] == 0.0) ? 0.0 : y[n] * factor;
        if (!std::isfinite(out.samples[n])) out.overflow = true;
        factor *= inv;
    }
    return out;
}

} // namespace ztinv
