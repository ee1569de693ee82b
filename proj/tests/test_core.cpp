#include <ztinv/core.hpp>
#include <ztinv/invdft.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace ztinv;

TEST_CASE("SplitMix64 is bit-reproducible") {
    SplitMix64 a(42);
    // Frozen from an independent implementation of the same constants.
    REQUIRE(a.next() == 0xbdd732262feb6e95ULL);

    SplitMix64 b(42);
    REQUIRE(b.uniform01() == 0.7415648787718233);
    REQUIRE(b.uniform01() == 0.1599103928769201);
    REQUIRE(b.uniform01() == 0.27860113025513866);
    REQUIRE(b.uniform01() == 0.34419071652363753);

    SECTION("uniform01 stays in [0, 1)") {
        SplitMix64 r(123456789);
        for (int i = 0; i < 10000; ++i) {
            const double u = r.uniform01();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
        }
    }

    SECTION("different seeds diverge") {
        SplitMix64 r1(1), r2(2);
        REQUIRE(r1.next() != r2.next());
    }
}

TEST_CASE("InversionConfig validation") {
    InversionConfig cfg;
    REQUIRE_NOTHROW(cfg.validate());

    SECTION("rejects annulus touching the unit circle") {
        cfg.annulus_min = 1.0;
        REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
        cfg.annulus_min = 0.9;
        REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("rejects inverted annulus") {
        cfg.annulus_min = 1.5;
        cfg.annulus_max = 1.2;
        REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    }
    SECTION("rejects non-positive sizes and tolerances") {
        InversionConfig bad = cfg;
        bad.n_samples = 0;
        REQUIRE_THROWS_AS(bad.validate(), ConfigError);
        bad = cfg;
        bad.contour_radius = 0.0;
        REQUIRE_THROWS_AS(bad.validate(), ConfigError);
        bad = cfg;
        bad.quad_tol = -1.0;
        REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("default_point_count follows the 1.1x rule") {
    REQUIRE(default_point_count(30) == 35); // ceil(1.1 * 31)
    REQUIRE(default_point_count(20) == 24); // ceil(1.1 * 21) = ceil(23.1)
    REQUIRE(default_point_count(1) == 3);
}

TEST_CASE("checked_eval rejects non-finite transform values") {
    const auto bad = [](Complex) { return Complex(1.0 / 0.0, 0.0); };
    REQUIRE_THROWS_AS(checked_eval(bad, Complex(1.0, 0.0)), EvalError);
    const auto good = [](Complex z) { return z * z; };
    REQUIRE(checked_eval(good, Complex(0.0, 1.0)) == Complex(-1.0, 0.0));
}

TEST_CASE("scale_transform shifts the argument") {
    const auto x = [](Complex z) { return 1.0 / (1.0 - 2.0 / z); };
    const auto y = scale_transform(x, 0.25);

    // X(z/a) with a = 0.25 moves the pole from 2 to 0.5.
    const auto expected = [](Complex z) { return 1.0 / (1.0 - 0.5 / z); };
    SplitMix64 rng(99);
    for (int i = 0; i < 10; ++i) {
        const Complex z = std::polar(1.0 + rng.uniform01(), 6.28 * rng.uniform01());
        REQUIRE(std::abs(y(z) - expected(z)) < 1e-14);
    }

    SECTION("rejects scale factors outside 0 < |a| < 1") {
        REQUIRE_THROWS_AS(scale_transform(x, 0.0), ConfigError);
        REQUIRE_THROWS_AS(scale_transform(x, 1.0), ConfigError);
        REQUIRE_THROWS_AS(scale_transform(x, -1.5), ConfigError);
    }
    SECTION("negative factors are allowed") {
        const auto yn = scale_transform(x, -0.5);
        const Complex z(3.0, 1.0);
        REQUIRE(std::abs(yn(z) - x(z / -0.5)) == 0.0);
    }
}

TEST_CASE("unscale_signal multiplies by a^-n") {
    SECTION("recovers a constant from a geometric") {
        std::vector<double> y(12);
        double p = 1.0;
        for (double& v : y) {
            v = p;
            p *= 0.5;
        }
        const UnscaledSignal u = unscale_signal(y, 0.5);
        REQUIRE_FALSE(u.overflow);
        for (double v : u.samples) REQUIRE(v == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("flags overflow instead of hiding it") {
        std::vector<double> y(1200, 1.0);
        const UnscaledSignal u = unscale_signal(y, 0.5); // 2^1199 is far past double range
        REQUIRE(u.overflow);
    }
    SECTION("zero samples stay zero even when the factor overflows") {
        std::vector<double> y(1200, 0.0);
        const UnscaledSignal u = unscale_signal(y, 0.5);
        REQUIRE_FALSE(u.overflow);
        for (double v : u.samples) REQUIRE(v == 0.0);
    }
    SECTION("rejects bad factors") {
        REQUIRE_THROWS_AS(unscale_signal({1.0}, 0.0), ConfigError);
        REQUIRE_THROWS_AS(unscale_signal({1.0}, 1.0), ConfigError);
    }
}

TEST_CASE("scaled inversion round-trips to the direct answer") {
    // Invert X directly, and also via Y(z) = X(z/a) followed by a^-n; the two
    // paths differ only by their aliasing errors, which the pole model bounds.
    const auto x = [](Complex z) { return 1.0 / (1.0 - 0.5 / z); };
    const int n = 24;
    const double a = 0.8;

    const SignalEstimate direct = invert_dft(x, n);
    const auto y = scale_transform(x, a);
    const SignalEstimate scaled = invert_dft(y, n);
    const UnscaledSignal undone = unscale_signal(scaled.samples, a);
    REQUIRE_FALSE(undone.overflow);

    const double bound =
        10.0 * (predicted_aliasing_error({1.0, 0.5 / a}, 0, n) +
                predicted_aliasing_error({1.0, 0.5}, 0, n));
    for (int i = 0; i < n; ++i) {
        REQUIRE(std::abs(direct.samples[static_cast<std::size_t>(i)] -
                         undone.samples[static_cast<std::size_t>(i)]) < bound);
    }
}
