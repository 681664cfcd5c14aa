#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fedauc/debias.hpp"
#include "fedauc/mechanisms.hpp"

using namespace fedauc;

TEST_CASE("zero noise rates are the identity") {
    auto est = estimate_base_rate(117317.0, 341090.0, NoiseRates::symmetric(0.0));
    REQUIRE(est.p_prime == Catch::Approx(117317.0));
    REQUIRE(est.pi_prime == Catch::Approx(0.2559).margin(5e-4));
    REQUIRE_FALSE(est.clamped);
}

TEST_CASE("base rate recovery, hand evaluation") {
    auto est = estimate_base_rate(400.0, 600.0, NoiseRates::symmetric(0.25));
    REQUIRE(est.p_prime == Catch::Approx(300.0));
    REQUIRE(est.pi_prime == Catch::Approx(0.3));
    REQUIRE(est.n_prime == Catch::Approx(700.0));
}

TEST_CASE("symmetric counts give pi 0.5") {
    auto est = estimate_base_rate(500.0, 500.0, NoiseRates::symmetric(0.2));
    REQUIRE(est.pi_prime == Catch::Approx(0.5));
}

TEST_CASE("base rate estimator concentrates under simulated flips") {
    // flip 10^6 labels with true pi = 0.3 and rho = 0.25, then invert
    RngStream rng(31);
    const int n = 1000000;
    const double rho = 0.25;
    int64_t noisy_p = 0;
    for (int i = 0; i < n; ++i) {
        int y = rng.bernoulli(0.3) ? 1 : 0;
        if (rng.bernoulli(rho)) y = 1 - y;
        noisy_p += y;
    }
    auto est = estimate_base_rate(static_cast<double>(noisy_p),
                                  static_cast<double>(n - noisy_p),
                                  NoiseRates::symmetric(rho));
    REQUIRE(est.pi_prime == Catch::Approx(0.3).margin(0.005));
}

TEST_CASE("negative estimate clamps with flag") {
    auto est = estimate_base_rate(10.0, 1000.0, NoiseRates::symmetric(0.4));
    REQUIRE(est.p_prime == 0.0);
    REQUIRE(est.clamped);
    REQUIRE(est.n_prime == Catch::Approx(1010.0));
}

TEST_CASE("singular rates rejected") {
    REQUIRE_THROWS_AS(estimate_base_rate(1.0, 1.0, NoiseRates{0.5, 0.5}), SingularRatesError);
    REQUIRE_THROWS_AS(debias_auc(0.6, 0.5, NoiseRates{0.6, 0.5}), SingularRatesError);
}

TEST_CASE("debias identity at zero rates") {
    REQUIRE(debias_auc(0.6321, 0.4, NoiseRates::symmetric(0.0)).value ==
            Catch::Approx(0.6321));
}

TEST_CASE("symmetric case: alpha = beta = rho at pi 0.5") {
    auto c = debias_coefficients(0.5, NoiseRates::symmetric(0.25));
    REQUIRE(c.alpha == Catch::Approx(0.25));
    REQUIRE(c.beta == Catch::Approx(0.25));
    REQUIRE(debias_auc(0.6, 0.5, NoiseRates::symmetric(0.25)).value == Catch::Approx(0.7));
}

TEST_CASE("random classifier stays random") {
    REQUIRE(debias_auc(0.5, 0.5, NoiseRates::symmetric(0.3)).value == Catch::Approx(0.5));
}

TEST_CASE("debias is strictly increasing in the noisy AUC") {
    NoiseRates rates = NoiseRates::symmetric(0.2);
    double prev = -1.0;
    for (double noisy = 0.3; noisy <= 0.9; noisy += 0.05) {
        double v = (noisy - 0.2) / 0.6;  // unclamped affine image at pi=0.5
        auto c = debias_coefficients(0.5, rates);
        double raw = (noisy - (c.alpha + c.beta) / 2.0) / (1.0 - c.alpha - c.beta);
        REQUIRE(raw == Catch::Approx(v).margin(1e-12));
        REQUIRE(raw > prev);
        prev = raw;
    }
}

TEST_CASE("out-of-range debias result clamps with flag") {
    auto v = debias_auc(0.99, 0.5, NoiseRates::symmetric(0.25));
    REQUIRE(v.value == 1.0);
    REQUIRE(v.clamped);
}

TEST_CASE("degenerate base rate rejected") {
    REQUIRE_THROWS_AS(debias_auc(0.6, 0.0, NoiseRates::symmetric(0.1)),
                      DegenerateBaseRateError);
    REQUIRE_THROWS_AS(debias_auc(0.6, 1.0, NoiseRates::symmetric(0.1)),
                      DegenerateBaseRateError);
}

TEST_CASE("asymmetric rates round-trip analytically") {
    // with known pi, rho+, rho-: E[noisy] = (1-alpha-beta)*clean + (alpha+beta)/2
    NoiseRates rates{0.1, 0.3};
    double pi = 0.4, clean = 0.82;
    auto c = debias_coefficients(pi, rates);
    double noisy = (1.0 - c.alpha - c.beta) * clean + (c.alpha + c.beta) / 2.0;
    REQUIRE(debias_auc(noisy, pi, rates).value == Catch::Approx(clean).margin(1e-12));
}
