#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fedauc/error.hpp"

namespace fedauc {

// Permutation assigning each sample a rank in 0..M-1 by increasing score.
struct RankAssignment {
    std::vector<int64_t> ranks;
};

struct AucValue {
    double value = 0.0;
    bool clamped = false;
};

inline AucValue clamp_auc(double v) {
    if (v < 0.0) return {0.0, true};
    if (v > 1.0) return {1.0, true};
    return {v, false};
}

// Ranks by increasing score; ties broken by original index (stable), so the
// output is always a permutation of 0..M-1 and deterministic.
inline RankAssignment rank_scores(std::span<const double> scores) {
    if (scores.size() < 2) throw InvalidInputError("need at least 2 scores to rank");
    for (double s : scores)
        if (!std::isfinite(s)) throw InvalidInputError("non-finite score");
    std::vector<int64_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int64_t a, int64_t b) { return scores[a] < scores[b]; });
    RankAssignment out;
    out.ranks.resize(scores.size());
    for (size_t pos = 0; pos < order.size(); ++pos)
        out.ranks[order[pos]] = static_cast<int64_t>(pos);
    return out;
}

// Rank-sum AUC: (sum r_i*y_i - P(P-1)/2) / (P*N). The rank sum is
// accumulated in 64-bit integers; sum r_i y_i <= M^2 so no overflow.
inline AucValue auc_from_ranks(const RankAssignment& ranks, std::span<const int> labels) {
    if (ranks.ranks.size() != labels.size())
        throw InvalidInputError("rank/label length mismatch");
    int64_t p = 0;
    int64_t rank_sum = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw InvalidInputError("label not in {0,1}");
        if (labels[i] == 1) {
            p += 1;
            rank_sum += ranks.ranks[i];
        }
    }
    int64_t n = static_cast<int64_t>(labels.size()) - p;
    if (p == 0 || n == 0) throw DegenerateLabelsError("AUC undefined: one class only");
    double num = static_cast<double>(rank_sum) - static_cast<double>(p) * (p - 1) / 2.0;
    return {num / (static_cast<double>(p) * static_cast<double>(n)), false};
}

// Brute-force pairwise oracle: fraction of positive-negative pairs ranked
// correctly, with 0.5 credit for ties. O(P*N); ground truth for tests.
inline AucValue auc_pairwise_oracle(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw InvalidInputError("score/label length mismatch");
    std::vector<double> pos, neg;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1)
            pos.push_back(scores[i]);
        else
            neg.push_back(scores[i]);
    }
    if (pos.empty() || neg.empty()) throw DegenerateLabelsError("AUC undefined: one class only");
    double credit = 0.0;
    for (double sp : pos)
        for (double sn : neg) {
            if (sp > sn)
                credit += 1.0;
            else if (sp == sn)
                credit += 0.5;
        }
    return {credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size())), false};
}

// AUC from already-aggregated (possibly noisy, real-valued) global statistics.
inline AucValue auc_from_global_stats(double global_sum, double p_bar, double n_bar) {
    if (p_bar <= 0.0 || n_bar <= 0.0)
        throw DegenerateLabelsError("AUC undefined: nonpositive class count");
    double v = (global_sum - p_bar * (p_bar - 1.0) / 2.0) / (p_bar * n_bar);
    return clamp_auc(v);
}

}  // namespace fedauc
