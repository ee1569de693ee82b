#pragma once

#include "core.hpp"
#include "zexpr.hpp"

#include <algorithm>
#include <string>
#include <vector>

// Truncated power-series arithmetic in w = z^-1, plus an oracle that expands
// an expression AST into its Laurent coefficients about z = infinity. The
// coefficient of w^n IS the signal sample x[n], so this module provides
// reference values for the numerical inverters without sharing any code with
// them: it includes only the core types and the expression AST, never the
// inversion headers.

namespace ztinv {

class UnsupportedForOracle : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// TruncatedSeries: coefficients c[0..order] of sum c[k] w^k, exact arithmetic
// up to the truncation order.
// ---------------------------------------------------------------------------

class TruncatedSeries {
public:
    explicit TruncatedSeries(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
        if (order < 0) throw ConfigError("series order must be non-negative");
    }
    explicit TruncatedSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) throw ConfigError("series needs at least the constant coefficient");
    }

    static TruncatedSeries constant(double value, int order) {
        TruncatedSeries s(order);
        s.c_[0] = value;
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& coeffs() const { return c_; }

private:
    std::vector<double> c_;
};

namespace detail {
inline void require_same_order(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.order() != b.order()) throw ConfigError("series orders differ");
}
} // namespace detail

inline TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    detail::require_same_order(a, b);
    TruncatedSeries r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] + b[k];
    return r;
}

inline TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    detail::require_same_order(a, b);
    TruncatedSeries r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] - b[k];
    return r;
}

inline TruncatedSeries operator-(const TruncatedSeries& a) {
    TruncatedSeries r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = -a[k];
    return r;
}

inline TruncatedSeries operator*(double s, const TruncatedSeries& a) {
    TruncatedSeries r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = s * a[k];
    return r;
}

/// Cauchy product truncated at the common order.
inline TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    detail::require_same_order(a, b);
    TruncatedSeries r(a.order());
    for (int k = 0; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += a[j] * b[k - j];
        r[k] = acc;
    }
    return r;
}

/// 1 / a(w), requires a[0] != 0.
inline TruncatedSeries series_reciprocal(const TruncatedSeries& a) {
    if (a[0] == 0.0) throw ConfigError("series reciprocal needs a non-zero constant term");
    TruncatedSeries r(a.order());
    r[0] = 1.0 / a[0];
    for (int k = 1; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += a[j] * r[k - j];
        r[k] = -acc / a[0];
    }
    return r;
}

// Elementary compositions via the standard differential recurrences: with
// f = exp(a), k f[k] = sum_{j=1..k} j a[j] f[k-j], and the sin/cos pair is
// advanced together the same way.

inline TruncatedSeries series_exp(const TruncatedSeries& a) {
    TruncatedSeries f(a.order());
    f[0] = std::exp(a[0]);
    for (int k = 1; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * a[j] * f[k - j];
        f[k] = acc / k;
    }
    return f;
}

namespace detail {
inline void series_sincos(const TruncatedSeries& a, TruncatedSeries& s, TruncatedSeries& c) {
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= a.order(); ++k) {
        double sa = 0.0, ca = 0.0;
        for (int j = 1; j <= k; ++j) {
            sa += j * a[j] * c[k - j];
            ca += j * a[j] * s[k - j];
        }
        s[k] = sa / k;
        c[k] = -ca / k;
    }
}
} // namespace detail

inline TruncatedSeries series_sin(const TruncatedSeries& a) {
    TruncatedSeries s(a.order()), c(a.order());
    detail::series_sincos(a, s, c);
    return s;
}

inline TruncatedSeries series_cos(const TruncatedSeries& a) {
    TruncatedSeries s(a.order()), c(a.order());
    detail::series_sincos(a, s, c);
    return c;
}

// ---------------------------------------------------------------------------
// Expression oracle. A subtree is carried as w^q * S(w) with S[0] != 0 after
// normalization; q < 0 records transient positive powers of z (as in the z
// sitting under 1/(z - 0.5)). `trusted` marks how far the coefficients of S
// are exact: alignment shifts in additions and shift-ins at function calls
// consume headroom, and the work order leaves 32 spare coefficients for that.
// ---------------------------------------------------------------------------

namespace detail {

struct LaurentForm {
    int q = 0;
    std::vector<double> s; // length work_order + 1
    int trusted = 0;       // indices 0..trusted of s are exact
};

class OracleBuilder {
public:
    explicit OracleBuilder(int work_order) : kw_(work_order) {}

    LaurentForm build(const ExprNode& node) { return form(node, false); }

private:
    int kw_;

    LaurentForm zero() const { return LaurentForm{0, std::vector<double>(kw_ + 1, 0.0), kw_}; }

    bool is_zero(const LaurentForm& f) const {
        for (int i = 0; i <= f.trusted; ++i)
            if (f.s[i] != 0.0) return false;
        return true;
    }

    /// Strip leading zero coefficients into the exponent q.
    LaurentForm normalized(LaurentForm f) const {
        int t = 0;
        while (t <= f.trusted && f.s[t] == 0.0) ++t;
        if (t > f.trusted) return zero();
        if (t == 0) return f;
        f.q += t;
        f.s.erase(f.s.begin(), f.s.begin() + t);
        f.s.resize(kw_ + 1, 0.0);
        f.trusted -= t;
        return f;
    }

    LaurentForm add(const LaurentForm& a, const LaurentForm& b) const {
        if (is_zero(a)) return b;
        if (is_zero(b)) return a;
        const int q = std::min(a.q, b.q);
        const int da = a.q - q, db = b.q - q;
        LaurentForm r{q, std::vector<double>(kw_ + 1, 0.0),
                      std::min({a.trusted + da, b.trusted + db, kw_})};
        for (int i = 0; i <= kw_; ++i) {
            double v = 0.0;
            if (i >= da) v += a.s[i - da];
            if (i >= db) v += b.s[i - db];
            r.s[i] = v;
        }
        return normalized(std::move(r));
    }

    LaurentForm negate(LaurentForm f) const {
        for (double& v : f.s) v = -v;
        return f;
    }

    LaurentForm multiply(const LaurentForm& a, const LaurentForm& b) const {
        if (is_zero(a) || is_zero(b)) return zero();
        LaurentForm r{a.q + b.q, std::vector<double>(kw_ + 1, 0.0), std::min(a.trusted, b.trusted)};
        for (int k = 0; k <= kw_; ++k) {
            double acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += a.s[j] * b.s[k - j];
            r.s[k] = acc;
        }
        return r;
    }

    LaurentForm reciprocal(const LaurentForm& a) const {
        if (is_zero(a)) throw UnsupportedForOracle("division by an identically zero expression");
        LaurentForm r{-a.q, std::vector<double>(kw_ + 1, 0.0), a.trusted};
        r.s[0] = 1.0 / a.s[0];
        for (int k = 1; k <= kw_; ++k) {
            double acc = 0.0;
            for (int j = 1; j <= k; ++j) acc += a.s[j] * r.s[k - j];
            r.s[k] = -acc / a.s[0];
        }
        return r;
    }

    LaurentForm integer_power(LaurentForm base, long long e) const {
        if (e < 0) return integer_power(reciprocal(base), -e);
        LaurentForm r = zero();
        r.s[0] = 1.0; // w^0 * 1
        while (e > 0) {
            if (e & 1) r = multiply(r, base);
            if ((e >>= 1) > 0) base = multiply(base, base);
        }
        return r;
    }

    /// Fold a z-free subtree to a real scalar.
    double fold_constant(const ExprNode& node) const {
        Complex v;
        try {
            v = eval_node(node, Complex(1.0, 0.0));
        } catch (const EvalError& e) {
            throw UnsupportedForOracle(std::string("constant subexpression failed to evaluate: ") + e.what());
        }
        if (v.imag() != 0.0)
            throw UnsupportedForOracle("constant subexpression is not real");
        return v.real();
    }

    /// Materialise w^q * S as a plain power series; requires q >= 0.
    std::vector<double> shift_in(const LaurentForm& f, int& trusted, const char* what) const {
        if (f.q < 0)
            throw UnsupportedForOracle(std::string(what) + " contains net positive powers of z");
        std::vector<double> a(kw_ + 1, 0.0);
        for (int i = f.q; i <= kw_; ++i) a[i] = f.s[i - f.q];
        trusted = std::min(f.trusted + f.q, kw_);
        return a;
    }

    // `sanctioned` is true when some ancestor legitimises positive powers of
    // z below it: either side of a division (rational transforms are written
    // z/(z-a) as often as 1/(1-a*z^-1)), or the base of a power with a
    // negative integer exponent. Outside such a context a z can only
    // contribute z^+k terms, which no right-sided sequence produces, so
    // z*z^-1 is refused even though its powers would cancel.
    LaurentForm form(const ExprNode& node, bool sanctioned) {
        if (!contains_z(node)) {
            const double c = fold_constant(node);
            if (c == 0.0) return zero();
            LaurentForm r = zero();
            r.s[0] = c;
            return r;
        }
        switch (node.kind) {
            case NodeKind::variable_z: {
                if (!sanctioned)
                    throw UnsupportedForOracle(
                        "bare positive power of z outside a ratio: no right-sided sequence "
                        "transforms to it, even when the powers would later cancel");
                LaurentForm r = zero();
                r.q = -1;
                r.s[0] = 1.0;
                return r;
            }
            case NodeKind::negate:
                return negate(form(*node.lhs, sanctioned));
            case NodeKind::add:
                return add(form(*node.lhs, sanctioned), form(*node.rhs, sanctioned));
            case NodeKind::subtract:
                return add(form(*node.lhs, sanctioned), negate(form(*node.rhs, sanctioned)));
            case NodeKind::multiply:
                return multiply(form(*node.lhs, sanctioned), form(*node.rhs, sanctioned));
            case NodeKind::divide: {
                LaurentForm num = form(*node.lhs, true);
                LaurentForm den = normalized(form(*node.rhs, true));
                return multiply(num, reciprocal(den));
            }
            case NodeKind::power: {
                const bool base_z = contains_z(*node.lhs);
                const bool expo_z = contains_z(*node.rhs);
                if (base_z && expo_z)
                    throw UnsupportedForOracle("power with z in both base and exponent");
                if (base_z) {
                    long long e = 0;
                    if (!constant_integer_exponent(*node.rhs, e))
                        throw UnsupportedForOracle("non-integer power of a z-dependent base");
                    LaurentForm base = normalized(form(*node.lhs, sanctioned || e < 0));
                    return integer_power(std::move(base), e);
                }
                // z-free base, z-dependent exponent: b^E = exp(E log b).
                const double b = fold_constant(*node.lhs);
                if (b <= 0.0)
                    throw UnsupportedForOracle("non-positive base raised to a z-dependent exponent");
                LaurentForm expo = normalized(form(*node.rhs, sanctioned));
                int trusted = 0;
                std::vector<double> arg = shift_in(expo, trusted, "exponent");
                const double lb = std::log(b);
                for (double& v : arg) v *= lb;
                TruncatedSeries res = series_exp(TruncatedSeries(std::move(arg)));
                return normalized(LaurentForm{0, res.coeffs(), trusted});
            }
            case NodeKind::call: {
                if (node.func == FuncId::log || node.func == FuncId::sqrt || node.func == FuncId::abs)
                    throw UnsupportedForOracle(std::string(func_name(node.func)) +
                                               " of a z-dependent argument has no Laurent expansion here");
                LaurentForm inner = normalized(form(*node.lhs, sanctioned));
                int trusted = 0;
                TruncatedSeries arg(shift_in(inner, trusted, "function argument"));
                TruncatedSeries res = node.func == FuncId::exp ? series_exp(arg)
                                    : node.func == FuncId::sin ? series_sin(arg)
                                                               : series_cos(arg);
                return normalized(LaurentForm{0, res.coeffs(), trusted});
            }
            default:
                throw UnsupportedForOracle("unexpected node kind in oracle");
        }
    }
};

} // namespace detail

/// Expand the transform as sum x[n] z^-n and return x[0..order]. Throws
/// UnsupportedForOracle when the expression has no such expansion (net
/// positive powers of z, fractional powers, log/sqrt/abs of z, ...).
inline TruncatedSeries oracle_from_ast(const ExprAst& ast, int order) {
    if (order < 0) throw ConfigError("oracle order must be non-negative");
    const int headroom = 32;
    detail::OracleBuilder builder(order + headroom);
    detail::LaurentForm f = builder.build(*ast.root);
    if (f.q < 0) {
        throw UnsupportedForOracle("expression reduces to net positive powers of z; "
                                   "no right-sided sequence has this transform");
    }
    TruncatedSeries out(order);
    for (int n = 0; n <= order; ++n) {
        if (n < f.q) continue;
        const int idx = n - f.q;
        if (idx > f.trusted)
            throw UnsupportedForOracle("oracle truncation headroom exhausted for this expression");
        out[n] = f.s[static_cast<std::size_t>(idx)];
    }
    return out;
}

inline TruncatedSeries oracle_from_expr(std::string_view source, int order) {
    return oracle_from_ast(parse(source), order);
}

} // namespace ztinv
