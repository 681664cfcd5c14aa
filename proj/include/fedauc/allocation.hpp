#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fedauc/error.hpp"
#include "fedauc/local_stats.hpp"
#include "fedauc/mechanisms.hpp"
#include "fedauc/rng.hpp"

namespace fedauc {

// Split of a rank vector r into the component parallel to the all-ones
// vector, u' = mean(r)*(1,...,1), and the orthogonal residual v' = r - u'.
struct OrthoDecomposition {
    std::vector<double> u_prime;
    std::vector<double> v_prime;
    double u_inf = 0.0;  // ||u'||_inf == mean(r) for nonnegative ranks
    double v_inf = 0.0;  // ||v'||_inf
};

inline OrthoDecomposition orthogonal_decompose(std::span<const int64_t> ranks) {
    if (ranks.empty()) throw InvalidInputError("cannot decompose empty rank vector");
    double mean = 0.0;
    for (int64_t r : ranks) mean += static_cast<double>(r);
    mean /= static_cast<double>(ranks.size());
    OrthoDecomposition d;
    d.u_prime.assign(ranks.size(), mean);
    d.v_prime.resize(ranks.size());
    d.u_inf = std::fabs(mean);
    for (size_t i = 0; i < ranks.size(); ++i) {
        d.v_prime[i] = static_cast<double>(ranks[i]) - mean;
        d.v_inf = std::max(d.v_inf, std::fabs(d.v_prime[i]));
    }
    return d;
}

// Fraction of epsilon spent on the s1 (parallel-channel) draw.
struct BetaAllocation {
    double beta = 1.0;
};

// Minimizer of the localSum' noise variance
//   f(beta) = 2a^2/(beta*eps)^2 + 2b^2/((1-beta)*eps)^2,  a=||u'||inf, b=||v'||inf.
// Setting f'(beta)=0 gives a^2/beta^3 = b^2/(1-beta)^3, hence
//   beta* = a^(2/3) / (a^(2/3) + b^(2/3)).
// beta = 1 when the residual vanishes (r parallel to ones): all budget goes
// to localP' and localSum' is a deterministic function of it.
inline BetaAllocation adaptive_beta(const OrthoDecomposition& decomp) {
    double a = decomp.u_inf;
    double b = decomp.v_inf;
    if (b == 0.0) return {1.0};
    if (a == 0.0) {
        // all-zero-rank one-sample client degenerates to a=b=0 handled above;
        // a=0 with b>0 cannot happen for rank vectors (mean of nonnegative
        // entries is 0 only if all are 0), but keep the formula total
        return {1.0};
    }
    double a23 = std::cbrt(a * a);
    double b23 = std::cbrt(b * b);
    return {a23 / (a23 + b23)};
}

// Correlated-noise release over the orthogonal decomposition:
//   s1 ~ Lap(1/(beta*eps)), s2 ~ Lap(1/((1-beta)*eps))
//   localP'   = <u,y> + s1
//   localSum' = <u',y> + ||u'||inf * s1 + <v',y> + ||v'||inf * s2
// s2 is omitted when beta == 1.
inline NoisyLocalStats noisy_stats_orthogonal(std::span<const int> labels,
                                              std::span<const int64_t> ranks,
                                              double epsilon, BetaAllocation beta,
                                              RngStream& rng) {
    if (labels.size() != ranks.size())
        throw InvalidInputError("label/rank length mismatch");
    if (!(epsilon > 0.0)) throw InvalidBudgetError("epsilon must be > 0");
    if (!(beta.beta > 0.0 && beta.beta <= 1.0))
        throw InvalidBudgetError("beta must be in (0,1]");

    OrthoDecomposition d = orthogonal_decompose(ranks);
    int64_t local_p = 0;
    double u_dot = 0.0, v_dot = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            local_p += 1;
            u_dot += d.u_prime[i];
            v_dot += d.v_prime[i];
        }
    }
    double s1 = laplace_sample(1.0 / (beta.beta * epsilon), rng);
    double s2 = 0.0;
    if (beta.beta < 1.0) s2 = laplace_sample(1.0 / ((1.0 - beta.beta) * epsilon), rng);

    NoisyLocalStats out;
    out.local_p = static_cast<double>(local_p) + s1;
    out.local_sum = u_dot + d.u_inf * s1 + v_dot + d.v_inf * s2;
    out.local_n = static_cast<double>(labels.size()) - out.local_p;
    return out;
}

// Naive split: eps_localSum = alpha*eps, eps_localP = (1-alpha)*eps.
inline std::pair<double, double> split_budget_naive(double epsilon, double alloc_alpha) {
    if (!(epsilon > 0.0)) throw InvalidBudgetError("epsilon must be > 0");
    if (!(alloc_alpha > 0.0 && alloc_alpha < 1.0))
        throw InvalidBudgetError("alloc_alpha must be in (0,1)");
    return {alloc_alpha * epsilon, (1.0 - alloc_alpha) * epsilon};
}

}  // namespace fedauc
