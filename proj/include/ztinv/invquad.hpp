#pragma once

#include "core.hpp"

#include <cstddef>
#include <string>
#include <vector>

// Classical contour inversion: x[n] = (1/2pi) integral of X(r e^{jt}) r^n
// e^{jnt} dt over one period. The integrand is smooth and periodic, so the
// composite trapezoid rule converges geometrically; each refinement doubles
// the node count and reuses every existing evaluation.

namespace ztinv {

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

struct QuadratureSettings {
    double radius = 1.0;      // contour |z| = r, must avoid poles
    double abs_tol = 1e-10;   // stop once successive refinements settle below this
    int max_refinements = 16; // doublings past the initial 32 nodes (so up to 2^21)

    void validate() const {
        if (radius <= 0.0) throw ConfigError("contour radius must be positive");
        if (abs_tol <= 0.0) throw ConfigError("abs_tol must be positive");
        if (max_refinements < 1) throw ConfigError("max_refinements must be at least 1");
    }
};

/// Integrand of the inversion integral (the 1/2pi lives in the quadrature
/// weight, not here).
template <TransformEvaluator F>
Complex contour_integrand(const F& x, int n, double r, double theta) {
    const Complex z = std::polar(r, theta);
    return checked_eval(x, z) * std::pow(r, n) * std::polar(1.0, n * theta);
}

namespace detail {

inline constexpr double two_pi = 2.0 * 3.14159265358979323846;
inline constexpr std::size_t quad_initial_nodes = 32;

/// Transform values on the contour at the current refinement level, in node
/// order. Doubling keeps old nodes at even slots and evaluates odd ones.
template <TransformEvaluator F>
class ContourNodes {
public:
    ContourNodes(const F& x, double r) : x_(x), r_(r) {}

    void refine() {
        const std::size_t m = values_.empty() ? quad_initial_nodes : 2 * values_.size();
        const double step = two_pi / static_cast<double>(m);
        std::vector<Complex> next(m);
        if (values_.empty()) {
            for (std::size_t k = 0; k < m; ++k)
                next[k] = checked_eval(x_, std::polar(r_, step * static_cast<double>(k)));
        } else {
            for (std::size_t k = 0; k < values_.size(); ++k) {
                next[2 * k] = values_[k];
                next[2 * k + 1] =
                    checked_eval(x_, std::polar(r_, step * static_cast<double>(2 * k + 1)));
            }
        }
        values_ = std::move(next);
        table_.resize(m);
        for (std::size_t t = 0; t < m; ++t)
            table_[t] = std::polar(1.0, step * static_cast<double>(t));
    }

    /// Trapezoid estimate of sample n at the current level. The twiddle index
    /// n*k is reduced mod m as an integer, so no angle drift enters for large
    /// n*k products.
    Complex estimate(int n) const {
        const std::size_t m = values_.size();
        Complex acc(0.0, 0.0);
        const auto un = static_cast<unsigned long long>(n);
        for (std::size_t k = 0; k < m; ++k) acc += values_[k] * table_[(un * k) % m];
        return acc * (std::pow(r_, n) / static_cast<double>(m));
    }

private:
    const F& x_;
    double r_;
    std::vector<Complex> values_;
    std::vector<Complex> table_;
};

struct QuadTrack {
    Complex value{0.0, 0.0};
    int refinements = 0;
    bool converged = false;
    int settled = 0; // consecutive refinements with |delta| < abs_tol
};

// A single delta below tolerance is not proof of convergence: with M nodes
// the rule reproduces any x[n + rM] alias exactly, so estimates at M and 2M
// can agree while both are wrong (X = z^-64 at n = 0 gives 1 for M = 32 and
// 64). Two consecutive settled deltas are required instead.
template <TransformEvaluator F>
std::vector<QuadTrack> run_refinement(const F& x, const std::vector<int>& ns,
                                      const QuadratureSettings& settings) {
    settings.validate();
    ContourNodes<F> nodes(x, settings.radius);
    nodes.refine();
    std::vector<QuadTrack> tracks(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) tracks[i].value = nodes.estimate(ns[i]);
    std::size_t remaining = ns.size();
    for (int level = 1; level <= settings.max_refinements && remaining > 0; ++level) {
        nodes.refine();
        for (std::size_t i = 0; i < ns.size(); ++i) {
            QuadTrack& t = tracks[i];
            if (t.converged) continue;
            const Complex est = nodes.estimate(ns[i]);
            const double delta = std::abs(est - t.value);
            t.value = est;
            t.refinements = level;
            t.settled = (delta < settings.abs_tol) ? t.settled + 1 : 0;
            if (t.settled >= 2) {
                t.converged = true;
                --remaining;
            }
        }
    }
    return tracks;
}

} // namespace detail

/// Contour integral for a single sample index. Throws NoConvergenceError when
/// the refinement budget runs out before two settled deltas.
template <TransformEvaluator F>
Complex integrate_contour(const F& x, int n, const QuadratureSettings& settings = {}) {
    if (n < 0) throw ConfigError("sample index must be non-negative");
    const auto tracks = detail::run_refinement(x, std::vector<int>{n}, settings);
    if (!tracks[0].converged)
        throw NoConvergenceError("contour quadrature did not settle for n = " + std::to_string(n) +
                                 " within " + std::to_string(settings.max_refinements) +
                                 " refinements (tolerance " + std::to_string(settings.abs_tol) + ")");
    return tracks[0].value;
}

/// Invert the first n_samples values. Samples that never settle are kept at
/// their last estimate and listed in `unconverged` rather than aborting the
/// whole run.
template <TransformEvaluator F>
SignalEstimate invert_quad(const F& x, int n_samples, const QuadratureSettings& settings = {}) {
    if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
    std::vector<int> ns(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) ns[static_cast<std::size_t>(i)] = i;
    const auto tracks = detail::run_refinement(x, ns, settings);

    SignalEstimate est;
    est.method = Method::quad;
    est.samples.resize(tracks.size());
    est.refinement_counts.resize(tracks.size());
    double leakage = 0.0;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        est.samples[i] = tracks[i].value.real();
        est.refinement_counts[i] = tracks[i].refinements;
        leakage = std::max(leakage, std::abs(tracks[i].value.imag()));
        if (!tracks[i].converged) est.unconverged.push_back(i);
    }
    est.imag_leakage = leakage;
    return est;
}

} // namespace ztinv
