// fedauc: federated AUC estimation under label differential privacy.
//
// Subcommands:
//   auc         exact AUC of a CSV dataset (rank formula + pairwise oracle)
//   run         one protocol run, optionally dumping the message transcript
//   experiment  Monte-Carlo trials, sweeps, and analytic predictors
//
// Exit codes: 0 success, 1 internal mismatch, 2 config/parse error,
// 3 degenerate labels.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fedauc/dataset.hpp"
#include "fedauc/federation.hpp"
#include "fedauc/harness.hpp"
#include "fedauc/metrics.hpp"

using namespace fedauc;

namespace {

constexpr uint64_t kDefaultSeed = 20240117;

uint64_t resolve_seed(std::optional<uint64_t> flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const char* env = std::getenv("FEDAUC_SEED")) return std::strtoull(env, nullptr, 10);
    return kDefaultSeed;
}

// "m=50000,pi=0.2559,sep=0.95"
SyntheticSpec parse_synthetic(const std::string& s) {
    SyntheticSpec spec;
    std::stringstream ss(s);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidInputError("bad synthetic spec: " + kv);
        std::string key = kv.substr(0, eq);
        double val = std::stod(kv.substr(eq + 1));
        if (key == "m")
            spec.m = static_cast<int64_t>(val);
        else if (key == "pi")
            spec.base_rate = val;
        else if (key == "sep")
            spec.separation = val;
        else
            throw InvalidInputError("unknown synthetic key: " + key);
    }
    return spec;
}

Dataset resolve_dataset(const std::string& input, const std::string& synthetic,
                        uint64_t seed) {
    if (!input.empty() && !synthetic.empty())
        throw InvalidInputError("--input and --synthetic are mutually exclusive");
    if (!input.empty()) return load_csv_file(input);
    if (!synthetic.empty()) {
        RngStream rng = RngStream::keyed(seed, 0, 0, "synthetic");
        return generate_synthetic(parse_synthetic(synthetic), rng);
    }
    throw InvalidInputError("need --input or --synthetic");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// "alpha=0.1:0.9:0.1" -> (name, values)
std::pair<std::string, std::vector<double>> parse_sweep(const std::string& s) {
    size_t eq = s.find('=');
    if (eq == std::string::npos) throw InvalidInputError("bad sweep spec: " + s);
    std::string name = s.substr(0, eq);
    if (name != "alpha" && name != "beta") throw InvalidInputError("sweep must be alpha or beta");
    std::stringstream ss(s.substr(eq + 1));
    std::string tok;
    std::vector<double> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() != 3) throw InvalidInputError("sweep spec must be lo:hi:step");
    std::vector<double> values;
    for (double v = parts[0]; v <= parts[1] + 1e-12; v += parts[2]) values.push_back(v);
    return {name, values};
}

void print_config_header(std::ostream& out, const std::string& what, uint64_t seed,
                         const std::string& detail) {
    out << "# fedauc " << what << " seed=" << seed;
    if (!detail.empty()) out << " " << detail;
    out << "\n";
}

int cmd_auc(const std::string& input) {
    Dataset ds = load_csv_file(input);
    AucValue by_ranks = auc_from_ranks(rank_scores(ds.scores()), ds.labels());
    AucValue by_pairs = auc_pairwise_oracle(ds.scores(), ds.labels());
    char buf[64];
    snprintf(buf, sizeof(buf), "%.17g", by_ranks.value);
    std::cout << buf << "\n";
    bool has_ties = [&] {
        std::vector<double> s = ds.scores();
        std::sort(s.begin(), s.end());
        return std::adjacent_find(s.begin(), s.end()) != s.end();
    }();
    if (!has_ties && std::fabs(by_ranks.value - by_pairs.value) > 1e-12) {
        std::cerr << "error: rank formula and pairwise oracle disagree\n";
        return 1;
    }
    return 0;
}

nlohmann::ordered_json report_to_json(const ExperimentReport& r) {
    return {{"mechanism", r.mechanism},
            {"epsilon", r.epsilon},
            {"alloc_alpha", r.alloc_alpha},
            {"alloc_beta", r.alloc_beta},
            {"clients", r.clients},
            {"partition", r.partition},
            {"pn_mode", r.pn_mode},
            {"trials", r.trials},
            {"mean_auc", r.mean_auc},
            {"std_auc", r.std_auc},
            {"predicted_std", r.predicted_std},
            {"clean_auc", r.clean_auc},
            {"clamp_count", r.clamp_count},
            {"wall_time_s", r.wall_time_s}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated AUC estimation under label differential privacy"};
    app.require_subcommand(1);

    // --- auc ---
    auto* auc_cmd = app.add_subcommand("auc", "exact AUC of a CSV dataset");
    std::string auc_input;
    auc_cmd->add_option("--input", auc_input, "CSV file (score,label)")->required();

    // --- shared protocol flags ---
    struct RunFlags {
        std::string input, synthetic;
        std::string mechanism = "rr";
        double epsilon = 1.0;
        double delta = 0.0;
        double alloc_alpha = 0.5;
        double alloc_beta = 0.5;
        int clients = 1;
        std::string partition = "iid";
        std::string pn_mode = "estimated";
        std::optional<uint64_t> seed;
    };
    auto add_run_flags = [](CLI::App* cmd, RunFlags& f) {
        cmd->add_option("--input", f.input, "CSV dataset");
        cmd->add_option("--synthetic", f.synthetic, "synthetic spec m=...,pi=...,sep=...");
        cmd->add_option("--mechanism", f.mechanism,
                        "rr|local-laplace|global-laplace|local-gaussian|"
                        "local-laplace-adaptive|local-laplace-orthogonal");
        cmd->add_option("--epsilon", f.epsilon, "privacy budget");
        cmd->add_option("--delta", f.delta, "delta (Gaussian only)");
        cmd->add_option("--alloc-alpha", f.alloc_alpha, "localSum/localP budget split");
        cmd->add_option("--alloc-beta", f.alloc_beta, "shared orthogonal-channel split");
        cmd->add_option("--clients", f.clients, "number of clients");
        cmd->add_option("--partition", f.partition, "iid|noniid");
        cmd->add_option("--pn-mode", f.pn_mode, "estimated|oracle");
        cmd->add_option("--seed", f.seed, "master seed (default fixed; env FEDAUC_SEED)");
    };

    // --- run ---
    auto* run_cmd = app.add_subcommand("run", "one protocol run");
    RunFlags rf;
    add_run_flags(run_cmd, rf);
    std::string transcript_path;
    run_cmd->add_option("--transcript", transcript_path, "write JSON-lines transcript here");

    // --- experiment ---
    auto* exp_cmd = app.add_subcommand("experiment", "Monte-Carlo experiments");
    RunFlags ef;
    add_run_flags(exp_cmd, ef);
    int trials = 100;
    std::string mechanisms_list, epsilons_list = "", sweep_spec, out_path, json_path;
    bool predict_only = false;
    exp_cmd->add_option("--trials", trials, "trials per configuration");
    exp_cmd->add_option("--mechanisms", mechanisms_list, "comma-separated mechanism list");
    exp_cmd->add_option("--epsilons", epsilons_list, "comma-separated epsilon list");
    exp_cmd->add_option("--sweep", sweep_spec, "alpha=lo:hi:step or beta=lo:hi:step");
    exp_cmd->add_option("--out", out_path, "CSV output path (default stdout)");
    exp_cmd->add_option("--json", json_path, "also write a JSON report here");
    exp_cmd->add_flag("--predict-only", predict_only, "emit analytic predictors, no trials");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*auc_cmd) return cmd_auc(auc_input);

        if (*run_cmd) {
            uint64_t seed = resolve_seed(rf.seed);
            Dataset ds = resolve_dataset(rf.input, rf.synthetic, seed);
            PrivacyBudget budget;
            budget.epsilon = rf.epsilon;
            budget.delta = rf.delta;
            budget.alloc_alpha = rf.alloc_alpha;
            budget.alloc_beta = rf.alloc_beta;
            budget.mechanism = mechanism_from_name(rf.mechanism);
            RngStream part_rng = RngStream::keyed(seed, 0, 0, "partition");
            PartitionPlan plan =
                partition(ds, rf.clients, partition_from_name(rf.partition), part_rng);
            ProtocolOptions opt;
            opt.master_seed = seed;
            opt.record_transcript = !transcript_path.empty();
            ProtocolResult result =
                run_protocol(ds, plan, budget, pn_mode_from_name(rf.pn_mode), opt);
            if (!transcript_path.empty()) {
                std::ofstream tf(transcript_path);
                if (!tf) throw InvalidInputError("cannot write " + transcript_path);
                for (const auto& msg : result.transcript) write_message(tf, msg);
            }
            print_config_header(std::cout, "run", seed,
                                "mechanism=" + rf.mechanism + " epsilon=" +
                                    std::to_string(rf.epsilon) +
                                    " clients=" + std::to_string(rf.clients) +
                                    " partition=" + rf.partition + " pn_mode=" + rf.pn_mode);
            char buf[64];
            snprintf(buf, sizeof(buf), "%.17g", result.auc.value);
            std::cout << buf << (result.auc.clamped ? " (clamped)" : "") << "\n";
            return 0;
        }

        if (*exp_cmd) {
            uint64_t seed = resolve_seed(ef.seed);
            Dataset ds = resolve_dataset(ef.input, ef.synthetic, seed);

            std::vector<std::string> mechanisms;
            if (!mechanisms_list.empty()) {
                std::stringstream ss(mechanisms_list);
                std::string tok;
                while (std::getline(ss, tok, ',')) mechanisms.push_back(tok);
            } else {
                mechanisms.push_back(ef.mechanism);
            }
            std::vector<double> epsilons =
                epsilons_list.empty() ? std::vector<double>{ef.epsilon} : parse_list(epsilons_list);

            std::vector<ExperimentReport> reports;
            auto base_config = [&](const std::string& mech, double eps) {
                ExperimentConfig cfg;
                cfg.budget.epsilon = eps;
                cfg.budget.delta = ef.delta;
                cfg.budget.alloc_alpha = ef.alloc_alpha;
                cfg.budget.alloc_beta = ef.alloc_beta;
                cfg.budget.mechanism = mechanism_from_name(mech);
                cfg.clients = ef.clients;
                cfg.strategy = partition_from_name(ef.partition);
                cfg.trials = trials;
                cfg.master_seed = seed;
                cfg.pn_mode = pn_mode_from_name(ef.pn_mode);
                return cfg;
            };
            auto run_one = [&](ExperimentConfig cfg) {
                if (predict_only) {
                    ExperimentReport rep;
                    rep.mechanism = mechanism_name(cfg.budget.mechanism);
                    rep.epsilon = cfg.budget.epsilon;
                    rep.alloc_alpha = cfg.budget.alloc_alpha;
                    rep.alloc_beta = cfg.budget.alloc_beta;
                    rep.clients = cfg.clients;
                    rep.partition = partition_name(cfg.strategy);
                    rep.pn_mode = cfg.pn_mode == PnMode::OraclePN ? "oracle" : "estimated";
                    rep.trials = 0;
                    rep.clean_auc =
                        auc_from_ranks(rank_scores(ds.scores()), ds.labels()).value;
                    auto pred = predicted_std_for(cfg, ds.size(), ds.positives(),
                                                  ds.negatives());
                    rep.predicted_std = pred.value_or(0.0);
                    reports.push_back(rep);
                } else {
                    reports.push_back(run_experiment(ds, cfg));
                }
            };

            if (!sweep_spec.empty()) {
                auto [name, values] = parse_sweep(sweep_spec);
                for (double v : values) {
                    auto cfg = base_config(
                        name == "beta" ? "local-laplace-orthogonal" : ef.mechanism,
                        ef.epsilon);
                    if (name == "alpha")
                        cfg.budget.alloc_alpha = v;
                    else
                        cfg.budget.alloc_beta = v;
                    run_one(cfg);
                }
            } else {
                for (const auto& mech : mechanisms)
                    for (double eps : epsilons) run_one(base_config(mech, eps));
            }

            std::ostream* out = &std::cout;
            std::ofstream of;
            if (!out_path.empty()) {
                of.open(out_path);
                if (!of) throw InvalidInputError("cannot write " + out_path);
                out = &of;
            }
            print_config_header(*out, "experiment", seed,
                                "trials=" + std::to_string(trials) + " clients=" +
                                    std::to_string(ef.clients) + " partition=" + ef.partition +
                                    " pn_mode=" + ef.pn_mode);
            write_report_csv_header(*out);
            for (const auto& r : reports) write_report_csv_row(*out, r);

            if (!json_path.empty()) {
                nlohmann::ordered_json doc;
                doc["seed"] = seed;
                doc["trials"] = trials;
                doc["reports"] = nlohmann::ordered_json::array();
                for (const auto& r : reports) doc["reports"].push_back(report_to_json(r));
                std::ofstream jf(json_path);
                if (!jf) throw InvalidInputError("cannot write " + json_path);
                jf << doc.dump(2) << "\n";
            }
            return 0;
        }
    } catch (const DegenerateLabelsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
