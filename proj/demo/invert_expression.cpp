// Inverts an expression with all three methods and tabulates the results
// against the series oracle. Pass an expression and optionally a sample
// count; defaults to the essential-singularity example.

#include <ztinv/ztinv.hpp>

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    const std::string source = argc > 1 ? argv[1] : "exp(1/z)*sin(1/z)";
    const int n_samples = argc > 2 ? std::stoi(argv[2]) : 12;

    try {
        const auto ast = ztinv::parse(source);
        if (ztinv::has_fractional_power_of_z(ast)) {
            std::fprintf(stderr, "demo: %s contains a fractional power of z\n", source.c_str());
            return 3;
        }
        const ztinv::ExprTransform x(ast);

        ztinv::InversionConfig config;
        config.n_samples = n_samples;
        const auto lsq = ztinv::invert_lsq(x, config);
        const auto dft = ztinv::invert_dft(x, n_samples);
        const auto quad = ztinv::invert_quad(x, n_samples);
        const auto oracle = ztinv::oracle_from_expr(source, n_samples - 1);

        std::printf("X(z) = %s\n\n", ztinv::format_expr(ast).c_str());
        std::printf("%4s %22s %22s %22s %22s\n", "n", "oracle", "lsq", "dft", "quad");
        for (int n = 0; n < n_samples; ++n) {
            const auto i = static_cast<std::size_t>(n);
            std::printf("%4d %22.15g %22.15g %22.15g %22.15g\n", n, oracle[n], lsq.samples[i],
                        dft.samples[i], quad.samples[i]);
        }
        std::printf("\nlsq residual %.3g, condition estimate %.3g\n",
                    lsq.residual_norm.value_or(0.0), lsq.condition_estimate.value_or(0.0));
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "demo: %s\n", e.what());
        return 1;
    }
}
