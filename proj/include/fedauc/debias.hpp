#pragma once

#include <cmath>

#include "fedauc/error.hpp"
#include "fedauc/metrics.hpp"

namespace fedauc {

// Class-conditional label flip probabilities. Randomized response gives the
// symmetric case rho_plus == rho_minus == 1/(1+e^eps).
struct NoiseRates {
    double rho_plus = 0.0;
    double rho_minus = 0.0;

    void validate() const {
        if (rho_plus < 0.0 || rho_minus < 0.0)
            throw InvalidInputError("flip probabilities must be nonnegative");
        if (rho_plus + rho_minus >= 1.0)
            throw SingularRatesError("rho_plus + rho_minus must be < 1");
    }

    static NoiseRates symmetric(double rho) { return {rho, rho}; }
};

struct BaseRateEstimate {
    double p_prime = 0.0;
    double n_prime = 0.0;
    double pi_prime = 0.0;
    bool clamped = false;
};

// Recover the clean positive count from observed noisy counts:
//   P' = (Pbar*(1-rho_minus) - Nbar*rho_minus) / (1 - rho_plus - rho_minus)
// then N' = Pbar + Nbar - P' and pi' = P'/(P'+N'). Noise can push P' outside
// [0, Pbar+Nbar]; it is clamped there with a flag.
inline BaseRateEstimate estimate_base_rate(double p_bar, double n_bar,
                                           const NoiseRates& rates) {
    rates.validate();
    double total = p_bar + n_bar;
    if (!(total > 0.0)) throw InvalidInputError("empty observed counts");
    double p_prime = (p_bar * (1.0 - rates.rho_minus) - n_bar * rates.rho_minus) /
                     (1.0 - rates.rho_plus - rates.rho_minus);
    bool clamped = false;
    if (p_prime < 0.0) {
        p_prime = 0.0;
        clamped = true;
    } else if (p_prime > total) {
        p_prime = total;
        clamped = true;
    }
    BaseRateEstimate out;
    out.p_prime = p_prime;
    out.n_prime = total - p_prime;
    out.pi_prime = p_prime / total;
    out.clamped = clamped;
    return out;
}

struct DebiasCoefficients {
    double alpha = 0.0;  // debias_alpha, not the budget-allocation alpha
    double beta = 0.0;   // debias_beta, not the channel-allocation beta
};

inline DebiasCoefficients debias_coefficients(double pi_prime, const NoiseRates& rates) {
    rates.validate();
    if (!(pi_prime > 0.0 && pi_prime < 1.0))
        throw DegenerateBaseRateError("base rate must be in (0,1)");
    DebiasCoefficients c;
    c.alpha = (1.0 - pi_prime) * rates.rho_minus /
              (pi_prime * (1.0 - rates.rho_plus) + (1.0 - pi_prime) * rates.rho_minus);
    c.beta = pi_prime * rates.rho_plus /
             (pi_prime * rates.rho_plus + (1.0 - pi_prime) * (1.0 - rates.rho_minus));
    return c;
}

// Invert the noise-induced bias:
//   AUC_clean = (AUC_noisy - (alpha+beta)/2) / (1 - alpha - beta)
// Strictly increasing affine in the noisy AUC when 1-alpha-beta > 0, so
// ordering of classifiers is preserved. Result clamped to [0,1] with a flag.
inline AucValue debias_auc(double noisy_auc, double pi_prime, const NoiseRates& rates) {
    DebiasCoefficients c = debias_coefficients(pi_prime, rates);
    double denom = 1.0 - c.alpha - c.beta;
    if (denom == 0.0) throw SingularRatesError("debias transform singular");
    return clamp_auc((noisy_auc - (c.alpha + c.beta) / 2.0) / denom);
}

}  // namespace fedauc
