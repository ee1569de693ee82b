#pragma once

#include "core.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

// Least-squares inversion from scattered annulus samples. Writing X(z_i) =
// sum_k x[k] z_i^-k at m points z_i gives a complex Vandermonde-type system
// in the unknown samples; stacking real and imaginary parts makes a real
// 2m x (N+1) least-squares problem, solved by Householder QR. Keeping the
// annulus outside the unit circle keeps |z^-k| <= 1 across columns, which is
// what keeps the system solvable at useful N.

namespace ztinv {

class RankDeficientError : public Error {
public:
    using Error::Error;
};

struct SamplePointSet {
    std::vector<Complex> points;
    std::uint64_t seed = 0;
    double annulus_min = 0.0;
    double annulus_max = 0.0;
};

/// Scatter m points over the annulus r_min < |z| < r_max, uniform in angle
/// and radius. The fixed generator makes a (m, r_min, r_max, seed) tuple
/// reproduce bit-identical points everywhere.
inline SamplePointSet draw_sample_points(int m, double r_min, double r_max, std::uint64_t seed) {
    if (m < 0) throw ConfigError("point count must be non-negative");
    if (r_min <= 1.0)
        throw ConfigError("annulus_min must exceed 1: sample points on or inside the unit "
                          "circle make the least-squares system ill-conditioned");
    if (r_max <= r_min) throw ConfigError("annulus_max must exceed annulus_min");
    SamplePointSet set;
    set.seed = seed;
    set.annulus_min = r_min;
    set.annulus_max = r_max;
    set.points.reserve(static_cast<std::size_t>(m));
    SplitMix64 rng(seed);
    for (int i = 0; i < m; ++i) {
        const double theta = 2.0 * 3.14159265358979323846 * rng.uniform01();
        const double rho = r_min + (r_max - r_min) * rng.uniform01();
        set.points.push_back(std::polar(rho, theta));
    }
    return set;
}

/// m x (N+1) matrix with entries z_i^-k, row-major.
class DesignMatrix {
public:
    DesignMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Complex entry(int i, int k) const { return a_[static_cast<std::size_t>(i) * cols_ + k]; }
    Complex& entry(int i, int k) { return a_[static_cast<std::size_t>(i) * cols_ + k]; }

private:
    int rows_, cols_;
    std::vector<Complex> a_;
};

inline DesignMatrix build_design_matrix(const SamplePointSet& set, int n_samples) {
    if (set.points.empty()) throw ConfigError("design matrix needs at least one sample point");
    if (n_samples < 0) throw ConfigError("n_samples must be non-negative");
    const int rows = static_cast<int>(set.points.size());
    const int cols = n_samples + 1;
    DesignMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const Complex inv = Complex(1.0, 0.0) / set.points[static_cast<std::size_t>(i)];
        Complex w(1.0, 0.0);
        for (int k = 0; k < cols; ++k) {
            a.entry(i, k) = w;
            w *= inv;
        }
    }
    return a;
}

struct LeastSquaresSolution {
    std::vector<double> coefficients; // x[0..N]
    double residual_norm = 0.0;       // ||A x - X|| over the complex rows
    double condition_estimate = 0.0;  // sigma_max / sigma_min of the stacked system
};

namespace detail {

/// Dense Householder QR on a row-major real matrix, rhs eliminated alongside.
/// Returns the signed R diagonal; the strict upper triangle of `b` holds R.
class HouseholderQr {
public:
    HouseholderQr(std::vector<double> m, int rows, int cols)
        : m_(std::move(m)), rows_(rows), cols_(cols) {}

    void factorize(std::vector<double>& rhs) {
        rdiag_.assign(static_cast<std::size_t>(cols_), 0.0);
        for (int k = 0; k < cols_; ++k) {
            double nrm = 0.0;
            for (int i = k; i < rows_; ++i) nrm = std::hypot(nrm, at(i, k));
            if (nrm == 0.0) {
                rdiag_[static_cast<std::size_t>(k)] = 0.0;
                continue;
            }
            if (at(k, k) < 0.0) nrm = -nrm;
            for (int i = k; i < rows_; ++i) at(i, k) /= nrm;
            at(k, k) += 1.0;
            for (int j = k + 1; j < cols_; ++j) {
                double s = 0.0;
                for (int i = k; i < rows_; ++i) s += at(i, k) * at(i, j);
                s = -s / at(k, k);
                for (int i = k; i < rows_; ++i) at(i, j) += s * at(i, k);
            }
            double s = 0.0;
            for (int i = k; i < rows_; ++i) s += at(i, k) * rhs[static_cast<std::size_t>(i)];
            s = -s / at(k, k);
            for (int i = k; i < rows_; ++i) rhs[static_cast<std::size_t>(i)] += s * at(i, k);
            rdiag_[static_cast<std::size_t>(k)] = -nrm;
        }
    }

    const std::vector<double>& rdiag() const { return rdiag_; }

    /// Upper-triangle entry R[k][j], j >= k.
    double r_entry(int k, int j) const { return j == k ? rdiag_[static_cast<std::size_t>(k)] : at(k, j); }

    std::vector<double> back_substitute(std::span<const double> qtb) const {
        std::vector<double> x(static_cast<std::size_t>(cols_));
        for (int k = cols_ - 1; k >= 0; --k) {
            double acc = qtb[static_cast<std::size_t>(k)];
            for (int j = k + 1; j < cols_; ++j) acc -= at(k, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(k)] = acc / rdiag_[static_cast<std::size_t>(k)];
        }
        return x;
    }

    // R and R^T products and solves for the condition estimate.
    std::vector<double> apply_r(std::span<const double> x) const {
        std::vector<double> y(static_cast<std::size_t>(cols_));
        for (int k = 0; k < cols_; ++k) {
            double acc = 0.0;
            for (int j = k; j < cols_; ++j) acc += r_entry(k, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(k)] = acc;
        }
        return y;
    }

    std::vector<double> apply_rt(std::span<const double> x) const {
        std::vector<double> y(static_cast<std::size_t>(cols_));
        for (int j = 0; j < cols_; ++j) {
            double acc = 0.0;
            for (int k = 0; k <= j; ++k) acc += r_entry(k, j) * x[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(j)] = acc;
        }
        return y;
    }

    std::vector<double> solve_r(std::span<const double> b) const { return back_substitute(b); }

    std::vector<double> solve_rt(std::span<const double> b) const {
        std::vector<double> y(static_cast<std::size_t>(cols_));
        for (int j = 0; j < cols_; ++j) {
            double acc = b[static_cast<std::size_t>(j)];
            for (int k = 0; k < j; ++k) acc -= r_entry(k, j) * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(j)] = acc / rdiag_[static_cast<std::size_t>(j)];
        }
        return y;
    }

private:
    double at(int i, int j) const { return m_[static_cast<std::size_t>(i) * cols_ + j]; }
    double& at(int i, int j) { return m_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::vector<double> m_;
    int rows_, cols_;
    std::vector<double> rdiag_;
};

inline double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

inline void normalize(std::vector<double>& v) {
    const double n = norm2(v);
    if (n > 0.0)
        for (double& x : v) x /= n;
}

/// sigma_max by power iteration on R^T R, sigma_min by the inverse iteration
/// with triangular solves. Both start from the deterministic all-ones vector;
/// a fixed iteration count keeps the estimate reproducible.
inline double estimate_condition(const HouseholderQr& qr, int cols) {
    std::vector<double> v(static_cast<std::size_t>(cols), 1.0);
    normalize(v);
    for (int it = 0; it < 60; ++it) {
        v = qr.apply_rt(qr.apply_r(v));
        normalize(v);
    }
    const double sigma_max = norm2(qr.apply_r(v));

    std::vector<double> w(static_cast<std::size_t>(cols), 1.0);
    normalize(w);
    double growth = 1.0;
    for (int it = 0; it < 60; ++it) {
        w = qr.solve_r(qr.solve_rt(w));
        growth = norm2(w);
        if (!std::isfinite(growth) || growth == 0.0) break;
        for (double& x : w) x /= growth;
    }
    if (!std::isfinite(growth) || growth <= 0.0) return std::numeric_limits<double>::infinity();
    const double sigma_min = 1.0 / std::sqrt(growth);
    return sigma_max / sigma_min;
}

} // namespace detail

/// Solve the stacked real least-squares system for the signal coefficients.
/// Normal equations would square the condition number, so the factorization
/// works on the stacked matrix directly.
inline LeastSquaresSolution solve_least_squares(const DesignMatrix& a,
                                                std::span<const Complex> values) {
    const int m = a.rows();
    const int cols = a.cols();
    if (static_cast<int>(values.size()) != m)
        throw ConfigError("value count does not match the design matrix rows");
    if (2 * m < cols)
        throw ConfigError("underdetermined system: need at least (N+1)/2 sample points");

    const int rows = 2 * m;
    std::vector<double> stacked(static_cast<std::size_t>(rows) * cols);
    std::vector<double> rhs(static_cast<std::size_t>(rows));
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < cols; ++k) {
            stacked[static_cast<std::size_t>(i) * cols + k] = a.entry(i, k).real();
            stacked[static_cast<std::size_t>(i + m) * cols + k] = a.entry(i, k).imag();
        }
        rhs[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)].real();
        rhs[static_cast<std::size_t>(i + m)] = values[static_cast<std::size_t>(i)].imag();
    }

    detail::HouseholderQr qr(std::move(stacked), rows, cols);
    qr.factorize(rhs);

    double max_diag = 0.0, min_diag = std::numeric_limits<double>::infinity();
    for (double d : qr.rdiag()) {
        max_diag = std::max(max_diag, std::abs(d));
        min_diag = std::min(min_diag, std::abs(d));
    }
    if (max_diag == 0.0 || min_diag < 1e-12 * max_diag)
        throw RankDeficientError(
            "design matrix is numerically rank-deficient (R diagonal ratio " +
            std::to_string(max_diag == 0.0 ? 0.0 : min_diag / max_diag) +
            "); use fewer coefficients, more points, or a different annulus");

    LeastSquaresSolution sol;
    sol.coefficients = qr.back_substitute(std::span<const double>(rhs.data(), rhs.size()));
    sol.condition_estimate = detail::estimate_condition(qr, cols);

    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        Complex pred(0.0, 0.0);
        for (int k = 0; k < cols; ++k)
            pred += a.entry(i, k) * sol.coefficients[static_cast<std::size_t>(k)];
        const Complex resid = values[static_cast<std::size_t>(i)] - pred;
        acc += std::norm(resid);
    }
    sol.residual_norm = std::sqrt(acc);
    return sol;
}

/// Full pipeline: draw annulus points, evaluate the transform, solve for
/// x[0..N]. The last coefficient absorbs truncation spill and is dropped, so
/// `samples` has exactly N entries.
template <TransformEvaluator F>
SignalEstimate invert_lsq(const F& x, const InversionConfig& config) {
    config.validate();
    const int n = config.n_samples;
    const int m = config.point_count > 0 ? config.point_count : default_point_count(n);
    if (m < n + 1)
        throw ConfigError("point_count must be at least n_samples + 1 (got m = " +
                          std::to_string(m) + " for N = " + std::to_string(n) + ")");

    const SamplePointSet set =
        draw_sample_points(m, config.annulus_min, config.annulus_max, config.rng_seed);
    std::vector<Complex> values(set.points.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) values[i] = checked_eval(x, set.points[i]);

    const DesignMatrix a = build_design_matrix(set, n);
    LeastSquaresSolution sol = solve_least_squares(a, values);

    SignalEstimate est;
    est.method = Method::lsq;
    est.samples.assign(sol.coefficients.begin(), sol.coefficients.begin() + n);
    est.residual_norm = sol.residual_norm;
    est.condition_estimate = sol.condition_estimate;
    return est;
}

} // namespace ztinv
