#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corelay/channel.hpp"
#include "corelay/distance_law.hpp"
#include "corelay/rng.hpp"

#include "test_util.hpp"

using namespace corelay;

TEST_CASE("identical (seed, stream) gives identical draws") {
    RngStream a(1234, "traffic"), b(1234, "traffic");
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream ids decorrelate") {
    RngStream a(1234, "traffic"), b(1234, "fading-gw");
    int equal = 0;
    double sum_ab = 0, sum_a = 0, sum_b = 0, sum_a2 = 0, sum_b2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = a.uniform01(), y = b.uniform01();
        if (x == y) ++equal;
        sum_ab += x * y;
        sum_a += x;
        sum_b += y;
        sum_a2 += x * x;
        sum_b2 += y * y;
    }
    CHECK(equal < 5);
    const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
    const double var_a = sum_a2 / n - (sum_a / n) * (sum_a / n);
    const double var_b = sum_b2 / n - (sum_b / n) * (sum_b / n);
    CHECK(std::abs(cov / std::sqrt(var_a * var_b)) < 0.02);
}

TEST_CASE("uniform01 stays in [0,1)") {
    RngStream rng(7, "tie-break");
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("rayleigh power fading has unit mean within 1% over 1e6 draws") {
    RngStream rng(99, "fading-gw");
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += RayleighPowerFading::sample(rng);
    CHECK(std::abs(sum / n - 1.0) < 0.01);
}

TEST_CASE("exponential matches its rate") {
    RngStream rng(5, "traffic");
    const double rate = 1.0 / 17.5;
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
    CHECK(sum / n == doctest::Approx(17.5).epsilon(0.02));
}

TEST_CASE("distance law sampling matches its cdf (KS < 0.01 at 1e5 samples)") {
    const DistanceLaw laws[] = {
        DistanceLaw::fixed(1200.0),
        DistanceLaw::annulus(500.0, 2500.0),
        DistanceLaw::disc(1800.0),
    };
    for (const DistanceLaw& law : laws) {
        RngStream rng(2024, "geometry");
        std::vector<double> samples(100000);
        for (double& s : samples) s = law.sample(rng);
        if (law.degenerate()) {
            for (double s : samples) CHECK(s == law.d);
            continue;
        }
        const double d =
            testutil::ks_statistic(samples, [&](double x) { return law.cdf(x); });
        CHECK(d < 0.01);
    }
}

TEST_CASE("distance law pdf integrates to the cdf") {
    const DistanceLaw law = DistanceLaw::annulus(300.0, 900.0);
    // trapezoid over the support
    const int steps = 20000;
    double acc = 0.0;
    const double h = (law.r_max - law.r_min) / steps;
    for (int i = 0; i < steps; ++i) {
        const double x0 = law.r_min + i * h, x1 = x0 + h;
        acc += 0.5 * (law.pdf(x0) + law.pdf(x1)) * h;
        if (i % 1000 == 999) CHECK(acc == doctest::Approx(law.cdf(x1)).epsilon(1e-4));
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("quantile inverts the cdf") {
    for (const DistanceLaw& law :
         {DistanceLaw::annulus(100.0, 700.0), DistanceLaw::disc(350.0)}) {
        for (double u : {0.01, 0.25, 0.5, 0.75, 0.99}) {
            CHECK(law.cdf(law.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
        }
    }
}
