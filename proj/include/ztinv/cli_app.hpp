#pragma once

#include "ztinv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

// Command implementations behind the ztinv binary. Everything takes explicit
// output streams and returns the process exit code, so tests can drive the
// exact CLI paths in-process; the real main() only parses flags into a
// CliRequest and forwards here.
//
// Exit codes: 0 success, 1 bad usage or configuration (including expression
// syntax errors), 2 evaluation or numerical failure, 3 refusal because the
// expression has a fractional power of z.

namespace ztinv {

enum class CliCommand { invert, compare, error_model, oracle };
enum class CliMethod { lsq, dft, quad, all };
enum class CliFormat { csv, tsv };

struct CliRequest {
    CliCommand command = CliCommand::invert;
    std::string expr;
    CliMethod method = CliMethod::dft;
    int n_samples = 1024;
    int point_count = 0; // 0 = ceil(1.1 * (N+1))
    double radius = 1.0;
    bool radius_given = false;
    std::optional<double> scale;
    std::uint64_t seed = 42;
    double tol = 1e-10;
    std::optional<std::string> output_path;
    CliFormat format = CliFormat::csv;
    // error-model inputs
    double model_amplitude = 1.0;
    double model_pole = 0.5;
    int model_index = 0;
};

/// Message printed (and documented) when inversion is refused: a fractional
/// power of z makes X(z) multi-valued, and no discrete-time sequence has a
/// multi-valued Z-transform.
inline constexpr const char* fractional_power_message =
    "ztinv: refusing to invert: the expression contains a fractional power of z, "
    "so X(z) is not single-valued and no discrete-time sequence has this transform";

/// Default seed, overridable through ZTINV_SEED; an unparseable value falls
/// back to 42 rather than failing startup.
inline std::uint64_t resolve_default_seed(const char* env_value) {
    if (!env_value || !*env_value) return 42;
    std::uint64_t v = 0;
    const char* end = env_value;
    while (*end) ++end;
    const auto res = std::from_chars(env_value, end, v);
    if (res.ec != std::errc{} || res.ptr != end) return 42;
    return v;
}

namespace detail {

inline std::string format_field(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline char separator(CliFormat f) { return f == CliFormat::csv ? ',' : '\t'; }

struct MethodOutcome {
    std::optional<SignalEstimate> estimate;
    std::string failure; // non-empty when the method threw
};

inline InversionConfig config_from(const CliRequest& req) {
    InversionConfig cfg;
    cfg.n_samples = req.n_samples;
    cfg.point_count = req.point_count;
    cfg.contour_radius = req.radius;
    cfg.quad_tol = req.tol;
    cfg.rng_seed = req.seed;
    return cfg;
}

template <TransformEvaluator F>
SignalEstimate run_method(Method m, const F& x, const CliRequest& req) {
    switch (m) {
        case Method::lsq:
            return invert_lsq(x, config_from(req));
        case Method::dft:
            return invert_dft(x, req.n_samples);
        case Method::quad: {
            QuadratureSettings settings;
            settings.radius = req.radius;
            settings.abs_tol = req.tol;
            return invert_quad(x, req.n_samples, settings);
        }
    }
    throw ConfigError("unknown method");
}

/// Run one method, applying the pole-scaling wrap/unwrap when requested.
/// Warnings accumulate as complete printable lines.
inline SignalEstimate compute_estimate(Method m, const ExprTransform& x, const CliRequest& req,
                                       std::vector<std::string>& warnings) {
    SignalEstimate est;
    if (req.scale) {
        const double a = *req.scale;
        auto scaled = scale_transform(x, a);
        est = run_method(m, scaled, req);
        UnscaledSignal u = unscale_signal(est.samples, a);
        if (u.overflow)
            warnings.push_back(std::string("ztinv: warning: undoing --scale ") + format_field(a) +
                               " overflowed for method " + method_name(m) +
                               "; late samples are not representable");
        est.samples = std::move(u.samples);
    } else {
        est = run_method(m, x, req);
    }
    const double leakage = est.imag_leakage.value_or(0.0);
    double peak = 0.0;
    for (double s : est.samples) peak = std::max(peak, std::abs(s));
    if (leakage > 1e-6 * std::max(peak, 1e-300))
        warnings.push_back(std::string("ztinv: warning: method ") + method_name(m) +
                           " discarded imaginary parts up to " + format_field(leakage) +
                           "; the transform may not correspond to a real sequence");
    if (!est.unconverged.empty())
        warnings.push_back(std::string("ztinv: warning: quadrature did not settle for ") +
                           std::to_string(est.unconverged.size()) +
                           " sample(s); their last estimates are reported");
    return est;
}

inline void append_diagnostics(const SignalEstimate& est, std::string& body) {
    body += "# method=";
    body += method_name(est.method);
    if (est.residual_norm) body += " residual_norm=" + format_field(*est.residual_norm);
    if (est.condition_estimate)
        body += " condition_estimate=" + format_field(*est.condition_estimate);
    if (est.imag_leakage) body += " imag_leakage=" + format_field(*est.imag_leakage);
    if (est.method == Method::quad)
        body += " unconverged=" + std::to_string(est.unconverged.size());
    body += '\n';
}

inline int deliver(const std::string& body, const CliRequest& req, std::ostream& out,
                   std::ostream& err) {
    if (req.output_path) {
        std::ofstream file(*req.output_path, std::ios::binary);
        if (!file) {
            err << "ztinv: error: cannot open output file '" << *req.output_path << "'\n";
            return 1;
        }
        file << body;
        if (!file.flush()) {
            err << "ztinv: error: failed writing output file '" << *req.output_path << "'\n";
            return 1;
        }
        return 0;
    }
    out << body;
    return 0;
}

inline std::vector<Method> selected_methods(CliMethod m) {
    switch (m) {
        case CliMethod::lsq: return {Method::lsq};
        case CliMethod::dft: return {Method::dft};
        case CliMethod::quad: return {Method::quad};
        case CliMethod::all: return {Method::lsq, Method::dft, Method::quad};
    }
    return {};
}

inline void warn_unused_radius(const CliRequest& req, std::ostream& err) {
    if (!req.radius_given) return;
    const auto methods = selected_methods(req.method);
    for (Method m : methods)
        if (m == Method::quad) return;
    err << "ztinv: warning: --radius only affects the quad method; ignoring it\n";
}

inline int run_invert(const CliRequest& req, std::ostream& out, std::ostream& err) {
    const ExprAst ast = parse(req.expr);
    if (has_fractional_power_of_z(ast)) {
        err << fractional_power_message << '\n';
        return 3;
    }
    warn_unused_radius(req, err);
    const ExprTransform x(ast);
    const char sep = separator(req.format);
    std::vector<std::string> warnings;

    const std::vector<Method> methods = selected_methods(req.method);
    std::vector<SignalEstimate> estimates;
    estimates.reserve(methods.size());
    for (Method m : methods) estimates.push_back(compute_estimate(m, x, req, warnings));

    std::string body = "n";
    for (Method m : methods) {
        body += sep;
        body += method_name(m);
    }
    body += '\n';
    for (int n = 0; n < req.n_samples; ++n) {
        body += std::to_string(n);
        for (const SignalEstimate& est : estimates) {
            body += sep;
            body += format_field(est.samples[static_cast<std::size_t>(n)]);
        }
        body += '\n';
    }
    for (const SignalEstimate& est : estimates) append_diagnostics(est, body);

    for (const std::string& w : warnings) err << w << '\n';
    return deliver(body, req, out, err);
}

inline int run_compare(const CliRequest& req, std::ostream& out, std::ostream& err) {
    const ExprAst ast = parse(req.expr);
    if (has_fractional_power_of_z(ast)) {
        err << fractional_power_message << '\n';
        return 3;
    }
    const ExprTransform x(ast);
    const char sep = separator(req.format);
    std::vector<std::string> warnings;

    std::optional<TruncatedSeries> oracle;
    std::string oracle_failure;
    try {
        oracle.emplace(oracle_from_ast(ast, req.n_samples - 1));
    } catch (const Error& e) {
        oracle_failure = e.what();
    }

    const Method order[3] = {Method::lsq, Method::dft, Method::quad};
    MethodOutcome outcomes[3];
    for (int i = 0; i < 3; ++i) {
        try {
            outcomes[i].estimate = compute_estimate(order[i], x, req, warnings);
        } catch (const Error& e) {
            outcomes[i].failure = e.what();
        }
    }

    std::string body = "n";
    body += sep;
    body += "oracle";
    for (Method m : order) {
        body += sep;
        body += method_name(m);
    }
    for (Method m : order) {
        body += sep;
        body += "abs_err_";
        body += method_name(m);
    }
    body += '\n';

    for (int n = 0; n < req.n_samples; ++n) {
        body += std::to_string(n);
        body += sep;
        if (oracle) body += format_field((*oracle)[n]);
        for (const MethodOutcome& o : outcomes) {
            body += sep;
            if (o.estimate) body += format_field(o.estimate->samples[static_cast<std::size_t>(n)]);
        }
        for (const MethodOutcome& o : outcomes) {
            body += sep;
            if (oracle && o.estimate)
                body += format_field(
                    std::abs(o.estimate->samples[static_cast<std::size_t>(n)] - (*oracle)[n]));
        }
        body += '\n';
    }

    for (const MethodOutcome& o : outcomes)
        if (o.estimate) append_diagnostics(*o.estimate, body);
    if (!oracle) body += "# status: oracle=unsupported: " + oracle_failure + '\n';
    for (int i = 0; i < 3; ++i)
        if (!outcomes[i].estimate)
            body += std::string("# status: ") + method_name(order[i]) + "=failed: " +
                    outcomes[i].failure + '\n';

    for (const std::string& w : warnings) err << w << '\n';
    return deliver(body, req, out, err);
}

inline int run_error_model(const CliRequest& req, std::ostream& out, std::ostream& err) {
    DominantPoleModel model;
    model.amplitude = req.model_amplitude;
    model.pole_radius = req.model_pole;
    const double predicted = predicted_aliasing_error(model, req.model_index, req.n_samples);
    std::string body;
    const char sep = separator(req.format);
    body += "A";
    body += sep;
    body += "a";
    body += sep;
    body += "n";
    body += sep;
    body += "N";
    body += sep;
    body += "predicted_abs_error\n";
    body += detail::format_field(model.amplitude);
    body += sep;
    body += detail::format_field(model.pole_radius);
    body += sep;
    body += std::to_string(req.model_index);
    body += sep;
    body += std::to_string(req.n_samples);
    body += sep;
    body += detail::format_field(predicted);
    body += '\n';
    return deliver(body, req, out, err);
}

inline int run_oracle(const CliRequest& req, std::ostream& out, std::ostream& err) {
    const ExprAst ast = parse(req.expr);
    const TruncatedSeries series = oracle_from_ast(ast, req.n_samples - 1);
    const char sep = separator(req.format);
    std::string body = "n";
    body += sep;
    body += "coefficient\n";
    for (int n = 0; n < req.n_samples; ++n) {
        body += std::to_string(n);
        body += sep;
        body += format_field(series[n]);
        body += '\n';
    }
    return deliver(body, req, out, err);
}

} // namespace detail

inline int run_cli(const CliRequest& req, std::ostream& out, std::ostream& err) {
    try {
        if (req.n_samples < 1) throw ConfigError("N must be at least 1");
        switch (req.command) {
            case CliCommand::invert: return detail::run_invert(req, out, err);
            case CliCommand::compare: return detail::run_compare(req, out, err);
            case CliCommand::error_model: return detail::run_error_model(req, out, err);
            case CliCommand::oracle: return detail::run_oracle(req, out, err);
        }
        return 1;
    } catch (const LexError& e) {
        err << "ztinv: error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "ztinv: error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        err << "ztinv: error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        // Evaluation and numerical failures: poles on the contour, rank
        // deficiency, quadrature that never settles, unsupported oracles.
        err << "ztinv: error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace ztinv
