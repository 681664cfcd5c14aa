#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fedauc/dataset.hpp"
#include "fedauc/debias.hpp"
#include "fedauc/error.hpp"
#include "fedauc/federation.hpp"
#include "fedauc/mechanisms.hpp"
#include "fedauc/metrics.hpp"
#include "fedauc/rng.hpp"

namespace fedauc {

// Two overlapping score populations on the unit interval; separation
// monotonically controls the clean AUC (Phi(separation/sqrt(2)) for the
// underlying normal pair, preserved by the logistic squash).
struct SyntheticSpec {
    int64_t m = 10000;
    double base_rate = 0.5;
    double separation = 1.0;
};

// separation value whose clean AUC is approximately `target_auc`.
inline double separation_for_auc(double target_auc) {
    // inverse normal CDF via Acklam's rational approximation, accurate to ~1e-9
    auto inv_phi = [](double p) {
        static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
        static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
        static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
        static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
        const double plow = 0.02425, phigh = 1 - plow;
        double q, r;
        if (p < plow) {
            q = std::sqrt(-2 * std::log(p));
            return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        if (p <= phigh) {
            q = p - 0.5;
            r = q * q;
            return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
                   (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
        }
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    };
    return std::sqrt(2.0) * inv_phi(target_auc);
}

// Labels ~ Bernoulli(base_rate); latent z ~ N(+-separation/2, 1); score is
// the logistic squash of z, a strictly monotone map into (0,1).
inline Dataset generate_synthetic(const SyntheticSpec& spec, RngStream& rng) {
    if (spec.m < 2) throw InvalidInputError("synthetic m must be >= 2");
    if (!(spec.base_rate > 0.0 && spec.base_rate < 1.0))
        throw InvalidInputError("base_rate must be in (0,1)");
    std::vector<Sample> records;
    records.reserve(spec.m);
    for (int64_t i = 0; i < spec.m; ++i) {
        int y = rng.bernoulli(spec.base_rate) ? 1 : 0;
        double z = rng.normal() + (y == 1 ? 0.5 : -0.5) * spec.separation;
        records.push_back({1.0 / (1.0 + std::exp(-z)), y});
    }
    return Dataset(std::move(records));
}

struct ExperimentConfig {
    PrivacyBudget budget;
    int clients = 1;
    PartitionStrategy strategy = PartitionStrategy::IID;
    int trials = 100;
    uint64_t master_seed = 0;
    PnMode pn_mode = PnMode::EstimatedPN;
};

struct ExperimentReport {
    std::string mechanism;
    double epsilon = 0.0;
    double alloc_alpha = 0.0;
    double alloc_beta = 0.0;
    int clients = 0;
    std::string partition;
    std::string pn_mode;
    int trials = 0;
    double mean_auc = 0.0;
    double std_auc = 0.0;
    double clean_auc = 0.0;
    double predicted_std = 0.0;  // 0 when no predictor applies
    int clamp_count = 0;
    double wall_time_s = 0.0;
};

// Var(AUC) under RR from the rank-sum view (no debias scaling):
//   rho(1-rho) * M(M-1)(2M-1)/6 / (P^2 N^2),  rho = 1/(1+e^eps)
inline double predict_std_rr(int64_t m, int64_t p, int64_t n, double epsilon) {
    if (p < 1 || n < 1 || m != p + n) throw InvalidInputError("bad counts");
    double rho = rr_flip_probability(epsilon);
    double md = static_cast<double>(m);
    double var = rho * (1.0 - rho) * md * (md - 1.0) * (2.0 * md - 1.0) / 6.0 /
                 (static_cast<double>(p) * p * static_cast<double>(n) * n);
    return std::sqrt(var);
}

// The verbatim predictor divided by (1 - alpha - beta): the debiased AUC is
// an affine rescale of the noisy one, so its std carries the same factor.
inline double predict_std_rr_corrected(int64_t m, int64_t p, int64_t n, double epsilon) {
    double pi = static_cast<double>(p) / static_cast<double>(m);
    NoiseRates rates = NoiseRates::symmetric(rr_flip_probability(epsilon));
    DebiasCoefficients c = debias_coefficients(pi, rates);
    return predict_std_rr(m, p, n, epsilon) / (1.0 - c.alpha - c.beta);
}

// sqrt(2K(M-1)^2 / (P^2 N^2 eps^2)); localSum noise only, oracle P and N.
inline double predict_std_global_laplace(int64_t m, int64_t p, int64_t n, int64_t k,
                                         double eps_localsum) {
    if (p < 1 || n < 1 || m != p + n || k < 1) throw InvalidInputError("bad counts");
    double md = static_cast<double>(m);
    double var = 2.0 * static_cast<double>(k) * (md - 1.0) * (md - 1.0) /
                 (static_cast<double>(p) * p * static_cast<double>(n) * n *
                  eps_localsum * eps_localsum);
    return std::sqrt(var);
}

// One-sample-per-client LocalLaplace: sqrt(K(K-1)(2K-1) / (3 P^2 N^2 eps^2)).
inline double predict_std_local_laplace_single(int64_t k, int64_t p, int64_t n,
                                               double eps_localsum) {
    if (p < 1 || n < 1 || k != p + n) throw InvalidInputError("one sample per client requires K = P + N");
    double kd = static_cast<double>(k);
    double var = kd * (kd - 1.0) * (2.0 * kd - 1.0) /
                 (3.0 * static_cast<double>(p) * p * static_cast<double>(n) * n *
                  eps_localsum * eps_localsum);
    return std::sqrt(var);
}

inline std::optional<double> predicted_std_for(const ExperimentConfig& cfg, int64_t m,
                                               int64_t p, int64_t n) {
    switch (cfg.budget.mechanism) {
        case Mechanism::RR:
            return predict_std_rr_corrected(m, p, n, cfg.budget.epsilon);
        case Mechanism::GlobalLaplace:
            return predict_std_global_laplace(m, p, n, cfg.clients,
                                              cfg.budget.alloc_alpha * cfg.budget.epsilon);
        case Mechanism::LocalLaplace:
            if (cfg.clients == m)
                return predict_std_local_laplace_single(
                    cfg.clients, p, n, cfg.budget.alloc_alpha * cfg.budget.epsilon);
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

// `trials` independent protocol runs; trial i uses substreams keyed by i, so
// the report is a pure function of (config, dataset, master_seed) regardless
// of execution order.
inline ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& cfg) {
    if (cfg.trials < 2) throw InvalidInputError("need trials >= 2 for std reporting");
    auto t0 = std::chrono::steady_clock::now();

    RankAssignment clean_ranks = rank_scores(dataset.scores());
    std::vector<int> labels = dataset.labels();
    double clean_auc = auc_from_ranks(clean_ranks, labels).value;

    std::vector<double> aucs(cfg.trials);
    int clamp_count = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        RngStream part_rng = RngStream::keyed(cfg.master_seed, t, 0, "partition");
        PartitionPlan plan = partition(dataset, cfg.clients, cfg.strategy, part_rng);
        ProtocolOptions opt;
        opt.master_seed = cfg.master_seed;
        opt.trial = t;
        try {
            ProtocolResult r = run_protocol(dataset, plan, cfg.budget, cfg.pn_mode, opt);
            aucs[t] = r.auc.value;
            if (r.auc.clamped) ++clamp_count;
        } catch (const DegenerateLabelsError&) {
            aucs[t] = 0.5;  // noise wiped out a class count; record as clamped
            ++clamp_count;
        } catch (const DegenerateBaseRateError&) {
            aucs[t] = 0.5;
            ++clamp_count;
        }
    }

    double mean = 0.0;
    for (double a : aucs) mean += a;
    mean /= cfg.trials;
    double ss = 0.0;
    for (double a : aucs) ss += (a - mean) * (a - mean);
    double stddev = std::sqrt(ss / (cfg.trials - 1));

    ExperimentReport rep;
    rep.mechanism = mechanism_name(cfg.budget.mechanism);
    rep.epsilon = cfg.budget.epsilon;
    rep.alloc_alpha = cfg.budget.alloc_alpha;
    rep.alloc_beta = cfg.budget.alloc_beta;
    rep.clients = cfg.clients;
    rep.partition = partition_name(cfg.strategy);
    rep.pn_mode = cfg.pn_mode == PnMode::OraclePN ? "oracle" : "estimated";
    rep.trials = cfg.trials;
    rep.mean_auc = mean;
    rep.std_auc = stddev;
    rep.clean_auc = clean_auc;
    auto pred = predicted_std_for(cfg, dataset.size(), dataset.positives(), dataset.negatives());
    rep.predicted_std = pred.value_or(0.0);
    rep.clamp_count = clamp_count;
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline void write_report_csv_header(std::ostream& out) {
    out << "mechanism,epsilon,alloc_alpha,alloc_beta,clients,partition,pn_mode,trials,"
           "mean_auc,std_auc,predicted_std,clean_auc,clamp_count\n";
}

inline void write_report_csv_row(std::ostream& out, const ExperimentReport& r) {
    char buf[512];
    snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%d,%s,%s,%d,%.17g,%.17g,%.17g,%.17g,%d\n",
             r.mechanism.c_str(), r.epsilon, r.alloc_alpha, r.alloc_beta, r.clients,
             r.partition.c_str(), r.pn_mode.c_str(), r.trials, r.mean_auc, r.std_auc,
             r.predicted_std, r.clean_auc, r.clamp_count);
    out << buf;
}

struct TopKResult {
    int64_t k;
    double precision;
    double recall;
};

// Guess the top-k scored samples positive; how well does that recover labels?
inline std::vector<TopKResult> topk_attack(const Dataset& dataset,
                                           const std::vector<int64_t>& k_values) {
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return dataset[a].score > dataset[b].score;
    });
    int64_t total_p = dataset.positives();
    std::vector<TopKResult> out;
    for (int64_t k : k_values) {
        if (k < 1 || k > static_cast<int64_t>(dataset.size()))
            throw InvalidInputError("top-k out of range");
        int64_t hits = 0;
        for (int64_t i = 0; i < k; ++i) hits += dataset[order[i]].label;
        out.push_back({k, static_cast<double>(hits) / k,
                       static_cast<double>(hits) / total_p});
    }
    return out;
}

// Baseline that perturbs scores instead of labels: Lap(1/eps) on every score
// (sensitivity 1 for sigmoid outputs), then AUC against the true labels.
inline AucValue score_perturbation_baseline(const Dataset& dataset, double epsilon,
                                            RngStream& rng) {
    if (!(epsilon > 0.0)) throw InvalidBudgetError("epsilon must be > 0");
    std::vector<double> noisy_scores = dataset.scores();
    for (double& s : noisy_scores) s += laplace_sample(1.0 / epsilon, rng);
    RankAssignment ranks = rank_scores(noisy_scores);
    return auc_from_ranks(ranks, dataset.labels());
}

}  // namespace fedauc
