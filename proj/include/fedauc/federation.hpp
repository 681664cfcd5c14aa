#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fedauc/allocation.hpp"
#include "fedauc/dataset.hpp"
#include "fedauc/debias.hpp"
#include "fedauc/error.hpp"
#include "fedauc/local_stats.hpp"
#include "fedauc/mechanisms.hpp"
#include "fedauc/metrics.hpp"
#include "fedauc/rng.hpp"

namespace fedauc {

enum class PartitionStrategy { IID, NonIID };

inline const char* partition_name(PartitionStrategy s) {
    return s == PartitionStrategy::IID ? "iid" : "noniid";
}

inline PartitionStrategy partition_from_name(const std::string& s) {
    if (s == "iid") return PartitionStrategy::IID;
    if (s == "noniid") return PartitionStrategy::NonIID;
    throw InvalidInputError("unknown partition strategy: " + s);
}

// Maps each sample index to a client. Sizes differ by at most one; under
// NonIID each client holds a contiguous block of the score-sorted order.
struct PartitionPlan {
    std::vector<int> assignment;  // length M, values in [0, k)
    int k = 1;
    PartitionStrategy strategy = PartitionStrategy::IID;
};

inline PartitionPlan partition(const Dataset& dataset, int k, PartitionStrategy strategy,
                               RngStream& rng) {
    const auto m = static_cast<int64_t>(dataset.size());
    if (k < 1 || k > m) throw InvalidInputError("client count must be in [1, M]");
    std::vector<int64_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    if (strategy == PartitionStrategy::IID) {
        rng.shuffle(order.begin(), order.end());
    } else {
        std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
            return dataset[a].score < dataset[b].score;
        });
    }
    PartitionPlan plan;
    plan.assignment.resize(m);
    plan.k = k;
    plan.strategy = strategy;
    // first (m % k) clients get one extra sample
    int64_t base = m / k, extra = m % k;
    int64_t pos = 0;
    for (int c = 0; c < k; ++c) {
        int64_t take = base + (c < extra ? 1 : 0);
        for (int64_t j = 0; j < take; ++j) plan.assignment[order[pos++]] = c;
    }
    return plan;
}

enum class PnMode { EstimatedPN, OraclePN };

inline PnMode pn_mode_from_name(const std::string& s) {
    if (s == "estimated") return PnMode::EstimatedPN;
    if (s == "oracle") return PnMode::OraclePN;
    throw InvalidInputError("unknown pn-mode: " + s);
}

enum class MessageKind { Scores, Ranks, Stats, Result };

// Wire message. By construction no variant carries a label field.
struct ProtocolMessage {
    MessageKind kind = MessageKind::Scores;
    int client_id = -1;
    std::vector<double> scores;    // kind == Scores
    std::vector<int64_t> ranks;    // kind == Ranks
    NoisyLocalStats stats;         // kind == Stats
    double auc = 0.0;              // kind == Result
};

// JSON-lines encoding with fixed field order; numbers at 17 significant digits.
inline void write_message(std::ostream& out, const ProtocolMessage& msg) {
    char buf[64];
    auto num = [&](double v) {
        snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    switch (msg.kind) {
        case MessageKind::Scores: {
            out << "{\"kind\":\"scores\",\"client_id\":" << msg.client_id << ",\"scores\":[";
            for (size_t i = 0; i < msg.scores.size(); ++i)
                out << (i ? "," : "") << num(msg.scores[i]);
            out << "]}\n";
            break;
        }
        case MessageKind::Ranks: {
            out << "{\"kind\":\"ranks\",\"client_id\":" << msg.client_id << ",\"ranks\":[";
            for (size_t i = 0; i < msg.ranks.size(); ++i)
                out << (i ? "," : "") << msg.ranks[i];
            out << "]}\n";
            break;
        }
        case MessageKind::Stats:
            out << "{\"kind\":\"stats\",\"client_id\":" << msg.client_id
                << ",\"sum\":" << num(msg.stats.local_sum) << ",\"p\":" << num(msg.stats.local_p)
                << ",\"n\":" << num(msg.stats.local_n) << "}\n";
            break;
        case MessageKind::Result:
            out << "{\"kind\":\"result\",\"auc\":" << num(msg.auc) << "}\n";
            break;
    }
}

// One ledger row per randomized release; the per-client rows must sum to the
// configured epsilon.
struct BudgetLedgerEntry {
    int client_id;
    std::string purpose;
    double epsilon;
};

// A label-holding party. Holds its slice of the dataset plus the shuffle it
// applied before submitting scores, so received ranks can be mapped back.
class ClientState {
public:
    ClientState(int id, std::vector<double> scores, std::vector<int> labels)
        : id_(id), scores_(std::move(scores)), labels_(std::move(labels)) {}

    int id() const { return id_; }
    size_t sample_count() const { return labels_.size(); }
    const std::vector<int>& labels() const { return labels_; }

    // Alg. 1: one-shot randomized response preprocessing. Labels are flipped
    // once and the flipped copy is reused for every later evaluation.
    void flip_labels_once(double epsilon, RngStream& rng) {
        if (!flipped_) {
            labels_ = rr_flip_labels(labels_, epsilon, rng);
            flipped_ = true;
        }
    }

    // Step 1: shuffle scores before sending, breaking positional correlation
    // with the labels kept locally.
    ProtocolMessage submit_scores(RngStream& rng) {
        perm_.resize(scores_.size());
        std::iota(perm_.begin(), perm_.end(), 0);
        rng.shuffle(perm_.begin(), perm_.end());
        ProtocolMessage msg;
        msg.kind = MessageKind::Scores;
        msg.client_id = id_;
        msg.scores.reserve(scores_.size());
        for (size_t p : perm_) msg.scores.push_back(scores_[p]);
        return msg;
    }

    // Ranks arrive in submission order; un-permute to local sample order.
    void receive_ranks(const ProtocolMessage& msg) {
        if (msg.ranks.size() != scores_.size())
            throw ProtocolError("rank count mismatch for client " + std::to_string(id_));
        ranks_.resize(scores_.size());
        for (size_t j = 0; j < perm_.size(); ++j) ranks_[perm_[j]] = msg.ranks[j];
    }

    const std::vector<int64_t>& ranks() const { return ranks_; }

    LocalStats exact_stats() const {
        LocalStats s;
        for (size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == 1) {
                s.local_p += 1;
                s.local_sum += ranks_[i];
            } else {
                s.local_n += 1;
            }
        }
        return s;
    }

    // RR path step 3: exact statistics over the (already flipped) labels.
    ProtocolMessage stats_rr(std::vector<BudgetLedgerEntry>* ledger, double epsilon) const {
        LocalStats s = exact_stats();
        if (ledger) ledger->push_back({id_, "flip", epsilon});
        return stats_message({static_cast<double>(s.local_sum), static_cast<double>(s.local_p),
                              static_cast<double>(s.local_n)});
    }

    // Laplace/Gaussian path step 3.
    ProtocolMessage stats_noisy(const PrivacyBudget& budget, int64_t global_m,
                                RngStream& sum_rng, RngStream& p_rng,
                                std::vector<BudgetLedgerEntry>* ledger) const {
        budget.validate();
        LocalStats s = exact_stats();
        auto [eps_sum, eps_p] = split_budget_naive(budget.epsilon, budget.alloc_alpha);
        NoisyLocalStats out;
        switch (budget.mechanism) {
            case Mechanism::LocalLaplace:
            case Mechanism::GlobalLaplace: {
                double delta_sum = budget.mechanism == Mechanism::GlobalLaplace
                                       ? static_cast<double>(global_m - 1)
                                       : static_cast<double>(max_rank());
                out.local_sum = static_cast<double>(s.local_sum);
                if (delta_sum > 0.0)
                    out.local_sum += laplace_sample(delta_sum / eps_sum, sum_rng);
                out.local_p = static_cast<double>(s.local_p) + laplace_sample(1.0 / eps_p, p_rng);
                out.local_n = static_cast<double>(sample_count()) - out.local_p;
                if (ledger) {
                    ledger->push_back({id_, "localSum-noise", eps_sum});
                    ledger->push_back({id_, "localP-noise", eps_p});
                }
                break;
            }
            case Mechanism::LocalGaussian: {
                // basic composition: epsilon and delta both split by alpha
                double delta_sum_budget = budget.alloc_alpha * budget.delta;
                double delta_p_budget = (1.0 - budget.alloc_alpha) * budget.delta;
                double sens_sum = static_cast<double>(max_rank());
                out.local_sum = static_cast<double>(s.local_sum);
                if (sens_sum > 0.0)
                    out.local_sum += gaussian_sample(sens_sum, eps_sum, delta_sum_budget, sum_rng);
                out.local_p = static_cast<double>(s.local_p) +
                              gaussian_sample(1.0, eps_p, delta_p_budget, p_rng);
                out.local_n = static_cast<double>(sample_count()) - out.local_p;
                if (ledger) {
                    ledger->push_back({id_, "localSum-noise", eps_sum});
                    ledger->push_back({id_, "localP-noise", eps_p});
                }
                break;
            }
            case Mechanism::LocalLaplaceAdaptive:
            case Mechanism::LocalLaplaceOrthogonal: {
                BetaAllocation beta{budget.alloc_beta};
                if (budget.mechanism == Mechanism::LocalLaplaceAdaptive)
                    beta = adaptive_beta(orthogonal_decompose(ranks_));
                out = noisy_stats_orthogonal(labels_, ranks_, budget.epsilon, beta, sum_rng);
                if (ledger) {
                    ledger->push_back({id_, "localSum-noise", beta.beta * budget.epsilon});
                    if (beta.beta < 1.0)
                        ledger->push_back({id_, "localP-noise", (1.0 - beta.beta) * budget.epsilon});
                }
                break;
            }
            default:
                throw InvalidBudgetError("mechanism has no noisy-stats path");
        }
        return stats_message(out);
    }

    int64_t max_rank() const {
        int64_t m = 0;
        for (int64_t r : ranks_) m = std::max(m, r);
        return m;
    }

private:
    ProtocolMessage stats_message(NoisyLocalStats s) const {
        ProtocolMessage msg;
        msg.kind = MessageKind::Stats;
        msg.client_id = id_;
        msg.stats = s;
        return msg;
    }

    int id_;
    std::vector<double> scores_;
    std::vector<int> labels_;
    std::vector<size_t> perm_;
    std::vector<int64_t> ranks_;
    bool flipped_ = false;
};

// Step 2: global ranking over all submitted scores; each client gets back the
// ranks of exactly its own scores, in its submission order.
inline std::vector<ProtocolMessage> server_rank_and_dispatch(
    const std::vector<ProtocolMessage>& score_messages, int expected_clients) {
    if (static_cast<int>(score_messages.size()) != expected_clients)
        throw ProtocolError("not all clients reported scores");
    std::vector<double> all_scores;
    for (const auto& msg : score_messages)
        all_scores.insert(all_scores.end(), msg.scores.begin(), msg.scores.end());
    RankAssignment ra = rank_scores(all_scores);
    std::vector<ProtocolMessage> out;
    out.reserve(score_messages.size());
    size_t offset = 0;
    for (const auto& msg : score_messages) {
        ProtocolMessage reply;
        reply.kind = MessageKind::Ranks;
        reply.client_id = msg.client_id;
        reply.ranks.assign(ra.ranks.begin() + offset,
                           ra.ranks.begin() + offset + msg.scores.size());
        offset += msg.scores.size();
        out.push_back(std::move(reply));
    }
    return out;
}

struct AggregateInput {
    PnMode pn_mode = PnMode::EstimatedPN;
    // true counts, used only in OraclePN mode
    int64_t oracle_p = 0;
    int64_t oracle_n = 0;
    // set for the RR path to trigger debiasing
    std::optional<NoiseRates> debias_rates;
};

// Step 4: aggregate client statistics and evaluate the rank-sum formula; the
// RR path then debiases via the estimated (or oracle) base rate.
inline AucValue server_aggregate(const std::vector<ProtocolMessage>& stats_messages,
                                 int expected_clients, const AggregateInput& in) {
    if (static_cast<int>(stats_messages.size()) != expected_clients)
        throw ProtocolError("not all clients reported stats");
    double global_sum = 0.0, p_bar = 0.0, n_bar = 0.0;
    for (const auto& msg : stats_messages) {
        global_sum += msg.stats.local_sum;
        p_bar += msg.stats.local_p;
        n_bar += msg.stats.local_n;
    }
    // Under randomized response the reported counts are the flipped-label counts
    // and belong in the rank-sum formula as-is; oracle mode then only pins the
    // base rate fed to the debias step. For additive-noise mechanisms oracle
    // mode swaps the noisy counts for the true ones.
    double p_used = p_bar, n_used = n_bar;
    if (in.pn_mode == PnMode::OraclePN && !in.debias_rates) {
        p_used = static_cast<double>(in.oracle_p);
        n_used = static_cast<double>(in.oracle_n);
    }
    if (p_used <= 0.0 || n_used <= 0.0)
        throw DegenerateLabelsError("degenerate counts after noise");
    AucValue noisy = auc_from_global_stats(global_sum, p_used, n_used);
    if (!in.debias_rates) return noisy;

    if (in.pn_mode == PnMode::OraclePN) {
        // With the true counts known the flipped rank sum inverts exactly:
        // E[S'] = (1 - rho+ - rho-) S + rho- T, T the total rank sum.
        double pd = static_cast<double>(in.oracle_p);
        double nd = static_cast<double>(in.oracle_n);
        double md = pd + nd;
        double total = md * (md - 1.0) / 2.0;
        double denom = 1.0 - in.debias_rates->rho_plus - in.debias_rates->rho_minus;
        double s_clean = (global_sum - in.debias_rates->rho_minus * total) / denom;
        return clamp_auc((s_clean - pd * (pd - 1.0) / 2.0) / (pd * nd));
    }
    double pi = estimate_base_rate(p_bar, n_bar, *in.debias_rates).pi_prime;
    AucValue clean = debias_auc(noisy.value, pi, *in.debias_rates);
    clean.clamped = clean.clamped || noisy.clamped;
    return clean;
}

struct ProtocolOptions {
    uint64_t master_seed = 0;
    uint64_t trial = 0;
    bool record_transcript = false;
    bool record_ledger = false;
};

struct ProtocolResult {
    AucValue auc;
    std::vector<ProtocolMessage> transcript;
    std::vector<BudgetLedgerEntry> ledger;
};

// End-to-end four-step run (steps shared by the RR and Laplace workflows;
// which statistics are noised depends on budget.mechanism).
inline ProtocolResult run_protocol(const Dataset& dataset, const PartitionPlan& plan,
                                   const PrivacyBudget& budget, PnMode pn_mode,
                                   const ProtocolOptions& opt) {
    budget.validate();
    if (plan.assignment.size() != dataset.size())
        throw InvalidInputError("partition does not match dataset");

    std::vector<std::vector<double>> scores_by_client(plan.k);
    std::vector<std::vector<int>> labels_by_client(plan.k);
    for (size_t i = 0; i < dataset.size(); ++i) {
        scores_by_client[plan.assignment[i]].push_back(dataset[i].score);
        labels_by_client[plan.assignment[i]].push_back(dataset[i].label);
    }

    std::vector<ClientState> clients;
    clients.reserve(plan.k);
    for (int c = 0; c < plan.k; ++c)
        clients.emplace_back(c, std::move(scores_by_client[c]), std::move(labels_by_client[c]));

    ProtocolResult result;
    auto record = [&](const ProtocolMessage& msg) {
        if (opt.record_transcript) result.transcript.push_back(msg);
    };
    auto* ledger = opt.record_ledger ? &result.ledger : nullptr;

    if (budget.mechanism == Mechanism::RR) {
        for (auto& client : clients) {
            RngStream flip_rng =
                RngStream::keyed(opt.master_seed, opt.trial, client.id(), "flip");
            client.flip_labels_once(budget.epsilon, flip_rng);
        }
    }

    // step 1: clients submit shuffled scores
    std::vector<ProtocolMessage> score_msgs;
    score_msgs.reserve(plan.k);
    for (auto& client : clients) {
        RngStream shuffle_rng =
            RngStream::keyed(opt.master_seed, opt.trial, client.id(), "shuffle");
        score_msgs.push_back(client.submit_scores(shuffle_rng));
        record(score_msgs.back());
    }

    // step 2: server ranks globally and dispatches
    std::vector<ProtocolMessage> rank_msgs = server_rank_and_dispatch(score_msgs, plan.k);
    for (const auto& msg : rank_msgs) {
        record(msg);
        clients[msg.client_id].receive_ranks(msg);
    }

    // step 3: clients report (noisy) statistics
    std::vector<ProtocolMessage> stats_msgs;
    stats_msgs.reserve(plan.k);
    const auto m = static_cast<int64_t>(dataset.size());
    for (auto& client : clients) {
        if (budget.mechanism == Mechanism::RR) {
            stats_msgs.push_back(client.stats_rr(ledger, budget.epsilon));
        } else {
            RngStream sum_rng =
                RngStream::keyed(opt.master_seed, opt.trial, client.id(), "localSum-noise");
            RngStream p_rng =
                RngStream::keyed(opt.master_seed, opt.trial, client.id(), "localP-noise");
            stats_msgs.push_back(client.stats_noisy(budget, m, sum_rng, p_rng, ledger));
        }
        record(stats_msgs.back());
    }

    // step 4: server aggregates
    AggregateInput agg;
    agg.pn_mode = pn_mode;
    agg.oracle_p = dataset.positives();
    agg.oracle_n = dataset.negatives();
    if (budget.mechanism == Mechanism::RR)
        agg.debias_rates = NoiseRates::symmetric(rr_flip_probability(budget.epsilon));
    result.auc = server_aggregate(stats_msgs, plan.k, agg);

    ProtocolMessage result_msg;
    result_msg.kind = MessageKind::Result;
    result_msg.auc = result.auc.value;
    record(result_msg);
    return result;
}

}  // namespace fedauc
