// Sweeps the DFT length on a one-pole transform and compares the measured
// aliasing error at n = 0 with the predicted |A a^(n+N) / (1 - a^N)|.

#include <ztinv/ztinv.hpp>

#include <cmath>
#include <cstdio>

int main() {
    const double a = 0.9;
    const auto x = [a](ztinv::Complex z) { return 1.0 / (1.0 - a / z); };
    const ztinv::DominantPoleModel model{1.0, a};

    std::printf("X(z) = 1/(1 - %.1fz^-1), exact x[0] = 1\n\n", a);
    std::printf("%6s %16s %16s %12s\n", "N", "measured", "predicted", "ratio");
    for (int n_samples = 10; n_samples <= 80; n_samples *= 2) {
        const auto est = ztinv::invert_dft(x, n_samples);
        const double measured = std::abs(est.samples[0] - 1.0);
        const double predicted = ztinv::predicted_aliasing_error(model, 0, n_samples);
        std::printf("%6d %16.6e %16.6e %12.6f\n", n_samples, measured, predicted,
                    measured / predicted);
    }
    std::printf("\nDoubling N divides the error by about a^-N, not by 2.\n");
    return 0;
}
