#pragma once

#include "core.hpp"

#include <span>
#include <vector>

// Inversion by uniform sampling on the unit circle. X(e^{jw}) is the DTFT of
// x[n], so an inverse DFT of N equispaced samples recovers the time-aliased
// signal x~[n] = sum_r x[n + rN]. For sequences decaying like A a^n the
// aliasing error is geometric in N and predicted by predicted_aliasing_error.

namespace ztinv {

struct SpectrumSamples {
    std::vector<Complex> values; // X at z_k = e^{j 2 pi k / N}, k = 0..N-1
};

/// Evaluate the transform at the N-th roots of unity. A sample that comes
/// back non-finite or implausibly large means a pole sits on (or hugs) the
/// contour; the error text points at pole scaling since that is the standard
/// way out.
template <TransformEvaluator F>
SpectrumSamples sample_unit_circle(const F& x, int n_samples) {
    if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
    SpectrumSamples out;
    out.values.resize(static_cast<std::size_t>(n_samples));
    const double step = 2.0 * 3.14159265358979323846 / n_samples;
    for (int k = 0; k < n_samples; ++k) {
        const Complex zk = std::polar(1.0, step * k);
        Complex v;
        try {
            v = checked_eval(x, zk);
        } catch (const EvalError& e) {
            throw EvalError(std::string(e.what()) +
                            " (a pole may lie on the unit circle; rescale it inside with "
                            "scale_transform and undo with unscale_signal)");
        }
        if (std::abs(v) > 1e12)
            throw EvalError("transform magnitude exceeds 1e12 on the unit circle; a pole "
                            "lies on or near the contour (rescale it inside with "
                            "scale_transform and undo with unscale_signal)");
        out.values[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Iterative radix-2 transform with sign +1 in the twiddle exponent.
/// Twiddles come from a quarter-wave-free direct table so no rounding drift
/// accumulates across stages. Output is NOT divided by N here.
inline void fft_inverse_inplace(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<Complex> table(n / 2);
    const double step = 2.0 * 3.14159265358979323846 / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) table[k] = std::polar(1.0, step * static_cast<double>(k));
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Complex w = table[j * stride];
                const Complex u = a[i + j];
                const Complex v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace detail

/// out[n] = (1/N) sum_k samples[k] e^{+j 2 pi k n / N}. Radix-2 when N is a
/// power of two, direct evaluation otherwise; both use exact twiddle indices
/// (k*n mod N) so the two paths agree to rounding.
inline std::vector<Complex> inverse_dft(std::span<const Complex> samples) {
    const std::size_t n = samples.size();
    if (n == 0) throw ConfigError("inverse_dft needs at least one sample");
    std::vector<Complex> out(samples.begin(), samples.end());
    if (detail::is_power_of_two(n)) {
        detail::fft_inverse_inplace(out);
    } else {
        std::vector<Complex> table(n);
        const double step = 2.0 * 3.14159265358979323846 / static_cast<double>(n);
        for (std::size_t t = 0; t < n; ++t) table[t] = std::polar(1.0, step * static_cast<double>(t));
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) acc += samples[k] * table[(i * k) % n];
            out[i] = acc;
        }
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (Complex& v : out) v *= scale;
    return out;
}

/// Full pipeline: sample on the unit circle, inverse DFT, keep real parts.
/// The discarded imaginary mass is reported as imag_leakage; for a real
/// signal it should sit at rounding level, so a large value flags a transform
/// that is not conjugate-symmetric on the circle.
template <TransformEvaluator F>
SignalEstimate invert_dft(const F& x, int n_samples) {
    const SpectrumSamples spectrum = sample_unit_circle(x, n_samples);
    const std::vector<Complex> time = inverse_dft(spectrum.values);
    SignalEstimate est;
    est.method = Method::dft;
    est.samples.resize(time.size());
    double leakage = 0.0;
    for (std::size_t i = 0; i < time.size(); ++i) {
        est.samples[i] = time[i].real();
        leakage = std::max(leakage, std::abs(time[i].imag()));
    }
    est.imag_leakage = leakage;
    return est;
}

/// |A a^{n+N} / (1 - a^N)|: magnitude of the leading aliasing term for a
/// signal dominated by A a^n, inverted with N circle samples.
inline double predicted_aliasing_error(const DominantPoleModel& model, int n, int n_samples) {
    if (std::abs(model.pole_radius) >= 1.0)
        throw ConfigError("aliasing model requires |a| < 1");
    if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
    if (n < 0) throw ConfigError("sample index must be non-negative");
    const double a = model.pole_radius;
    const double num = model.amplitude * std::pow(a, n + n_samples);
    const double den = 1.0 - std::pow(a, n_samples);
    return std::abs(num / den);
}

} // namespace ztinv
