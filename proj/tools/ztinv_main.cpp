#include <ztinv/cli_app.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

// Command-line front end. Parses flags into a CliRequest and hands off to
// run_cli; all behaviour lives in the library so tests can call it directly.

namespace {

void add_output_options(CLI::App* cmd, std::string& format_name, std::string& output_path) {
    cmd->add_option("-o,--output", output_path, "Write to this file instead of stdout");
    cmd->add_option("--format", format_name, "Output format: csv or tsv")
        ->check(CLI::IsMember({"csv", "tsv"}))
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    ztinv::CliRequest req;
    req.seed = ztinv::resolve_default_seed(std::getenv("ZTINV_SEED"));

    CLI::App app{"Numerical inverse Z-transform: recover x[n] from an expression for X(z)"};
    app.require_subcommand(1);

    std::string method_name = "dft";
    std::string format_name = "csv";
    std::string output_path;
    double scale = 0.0;

    CLI::App* invert = app.add_subcommand("invert", "Invert X(z) with one method (or all)");
    invert->add_option("expr,--expr", req.expr, "Expression for X(z), e.g. \"1/(1-0.5*z^-1)\"")
        ->required();
    invert->add_option("-m,--method", method_name, "Inversion method: lsq, dft, quad, or all")
        ->check(CLI::IsMember({"lsq", "dft", "quad", "all"}))
        ->capture_default_str();
    invert->add_option("-N,--N,--samples", req.n_samples, "Number of signal samples to recover")
        ->capture_default_str();
    invert->add_option("--points", req.point_count,
                       "Annulus sample count for lsq (default ceil(1.1*(N+1)))");
    auto* radius_opt =
        invert->add_option("--radius", req.radius, "Contour radius for quad")->capture_default_str();
    auto* scale_opt = invert->add_option(
        "--scale", scale, "Pole-scaling factor a (0 < |a| < 1): invert X(z/a), undo a^-n");
    invert->add_option("--seed", req.seed, "Seed for the annulus point draw (env ZTINV_SEED)")
        ->capture_default_str();
    invert->add_option("--tol", req.tol, "Quadrature stopping tolerance")->capture_default_str();
    add_output_options(invert, format_name, output_path);

    CLI::App* compare = app.add_subcommand(
        "compare", "Run all methods plus the series oracle and tabulate the errors");
    compare->add_option("expr,--expr", req.expr, "Expression for X(z)")->required();
    compare->add_option("-N,--N,--samples", req.n_samples, "Number of signal samples to recover")
        ->capture_default_str();
    compare->add_option("--points", req.point_count,
                        "Annulus sample count for lsq (default ceil(1.1*(N+1)))");
    auto* cmp_radius_opt =
        compare->add_option("--radius", req.radius, "Contour radius for quad")->capture_default_str();
    auto* cmp_scale_opt = compare->add_option(
        "--scale", scale, "Pole-scaling factor a (0 < |a| < 1): invert X(z/a), undo a^-n");
    compare->add_option("--seed", req.seed, "Seed for the annulus point draw (env ZTINV_SEED)")
        ->capture_default_str();
    compare->add_option("--tol", req.tol, "Quadrature stopping tolerance")->capture_default_str();
    add_output_options(compare, format_name, output_path);

    CLI::App* model = app.add_subcommand(
        "error-model", "Predicted aliasing error |A a^(n+N) / (1 - a^N)| for a dominant pole");
    model->add_option("--A", req.model_amplitude, "Amplitude of the dominant term A*a^n")
        ->capture_default_str();
    model->add_option("--a", req.model_pole, "Dominant pole radius, |a| < 1")->required();
    model->add_option("--n", req.model_index, "Sample index")->capture_default_str();
    model->add_option("-N,--N,--samples", req.n_samples, "DFT length the prediction refers to")
        ->required();
    add_output_options(model, format_name, output_path);

    CLI::App* oracle = app.add_subcommand(
        "oracle", "Series-expansion reference coefficients x[0..N-1], no numerics involved");
    oracle->add_option("expr,--expr", req.expr, "Expression for X(z)")->required();
    oracle->add_option("-N,--N,--samples", req.n_samples, "Number of coefficients")
        ->capture_default_str();
    add_output_options(oracle, format_name, output_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints the message / help text; fold its exit codes into the
        // documented contract (0 for help, 1 for usage errors).
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (invert->parsed()) {
        req.command = ztinv::CliCommand::invert;
        req.radius_given = radius_opt->count() > 0;
        if (scale_opt->count() > 0) req.scale = scale;
    } else if (compare->parsed()) {
        req.command = ztinv::CliCommand::compare;
        req.radius_given = cmp_radius_opt->count() > 0;
        if (cmp_scale_opt->count() > 0) req.scale = scale;
    } else if (model->parsed()) {
        req.command = ztinv::CliCommand::error_model;
    } else {
        req.command = ztinv::CliCommand::oracle;
    }

    if (method_name == "lsq") req.method = ztinv::CliMethod::lsq;
    else if (method_name == "quad") req.method = ztinv::CliMethod::quad;
    else if (method_name == "all") req.method = ztinv::CliMethod::all;
    else req.method = ztinv::CliMethod::dft;

    req.format = format_name == "tsv" ? ztinv::CliFormat::tsv : ztinv::CliFormat::csv;
    if (!output_path.empty()) req.output_path = output_path;

    return ztinv::run_cli(req, std::cout, std::cerr);
}
