#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fedauc/error.hpp"
#include "fedauc/rng.hpp"

namespace fedauc {

enum class Mechanism {
    RR,
    LocalLaplace,
    GlobalLaplace,
    LocalGaussian,
    LocalLaplaceAdaptive,
    // one shared beta for every client, no per-client adaptation
    LocalLaplaceOrthogonal,
};

inline const char* mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::RR: return "rr";
        case Mechanism::LocalLaplace: return "local-laplace";
        case Mechanism::GlobalLaplace: return "global-laplace";
        case Mechanism::LocalGaussian: return "local-gaussian";
        case Mechanism::LocalLaplaceAdaptive: return "local-laplace-adaptive";
        case Mechanism::LocalLaplaceOrthogonal: return "local-laplace-orthogonal";
    }
    return "?";
}

inline Mechanism mechanism_from_name(const std::string& s) {
    if (s == "rr") return Mechanism::RR;
    if (s == "local-laplace") return Mechanism::LocalLaplace;
    if (s == "global-laplace") return Mechanism::GlobalLaplace;
    if (s == "local-gaussian") return Mechanism::LocalGaussian;
    if (s == "local-laplace-adaptive") return Mechanism::LocalLaplaceAdaptive;
    if (s == "local-laplace-orthogonal") return Mechanism::LocalLaplaceOrthogonal;
    throw InvalidInputError("unknown mechanism: " + s);
}

struct PrivacyBudget {
    double epsilon = 1.0;
    double delta = 0.0;       // required > 0 only for Gaussian
    double alloc_alpha = 0.5; // eps_localSum = alpha*eps, eps_localP = (1-alpha)*eps
    double alloc_beta = 0.5;  // shared beta for the orthogonal variant
    Mechanism mechanism = Mechanism::RR;

    void validate() const {
        if (!(epsilon > 0.0)) throw InvalidBudgetError("epsilon must be > 0");
        if (delta < 0.0 || delta >= 1.0) throw InvalidBudgetError("delta must be in [0,1)");
        if (!(alloc_alpha > 0.0 && alloc_alpha < 1.0))
            throw InvalidBudgetError("alloc_alpha must be in (0,1)");
        if (!(alloc_beta > 0.0 && alloc_beta <= 1.0))
            throw InvalidBudgetError("alloc_beta must be in (0,1]");
        if (mechanism == Mechanism::LocalGaussian && delta == 0.0)
            throw InvalidBudgetError("Gaussian mechanism needs delta > 0");
    }
};

// rho = 1/(1+e^eps), the probability a label is flipped under randomized
// response. eps = 0 is rejected: rho = 0.5 makes the debias transform singular.
inline double rr_flip_probability(double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidBudgetError("epsilon must be > 0");
    return 1.0 / (1.0 + std::exp(epsilon));
}

// One-shot randomized response over a label vector. Each label independently
// kept with probability e^eps/(1+e^eps), else flipped.
inline std::vector<int> rr_flip_labels(std::span<const int> labels, double epsilon,
                                       RngStream& rng) {
    double rho = rr_flip_probability(epsilon);
    std::vector<int> out(labels.begin(), labels.end());
    for (int& y : out)
        if (rng.bernoulli(rho)) y = 1 - y;
    return out;
}

// Lap(0, b) by inverse CDF: U uniform on (-1/2, 1/2), -b*sgn(U)*ln(1-2|U|).
inline double laplace_sample(double scale, RngStream& rng) {
    if (!(scale > 0.0)) throw InvalidBudgetError("Laplace scale must be > 0");
    double u = rng.uniform_centered();
    if (u == 0.0) return 0.0;
    double sign = u > 0.0 ? 1.0 : -1.0;
    return -scale * sign * std::log(1.0 - 2.0 * std::fabs(u));
}

// Classical (eps, delta) Gaussian mechanism calibration.
inline double gaussian_sigma(double sensitivity, double epsilon, double delta) {
    if (!(sensitivity > 0.0)) throw InvalidBudgetError("sensitivity must be > 0");
    if (!(epsilon > 0.0)) throw InvalidBudgetError("epsilon must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidBudgetError("Gaussian mechanism needs delta in (0,1)");
    return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

inline double gaussian_sample(double sensitivity, double epsilon, double delta,
                              RngStream& rng) {
    return gaussian_sigma(sensitivity, epsilon, delta) * rng.normal();
}

}  // namespace fedauc
