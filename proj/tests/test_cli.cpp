#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandResult {
    int exit_code;
    std::string output;  // stdout only
};

CommandResult run_cli(const std::string& args) {
    std::string out_file = "cli_stdout.tmp";
    std::string cmd = std::string(FEDAUC_CLI_PATH) + " " + args + " >" + out_file + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(out_file.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("auc subcommand on the four-sample example") {
    write_file("four.csv", "score,label\n0.1,0\n0.35,1\n0.4,0\n0.8,1\n");
    auto r = run_cli("auc --input four.csv");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output == "0.75\n");
    std::remove("four.csv");
}

TEST_CASE("auc subcommand exit codes") {
    write_file("one_class.csv", "score,label\n0.1,1\n0.8,1\n");
    REQUIRE(run_cli("auc --input one_class.csv").exit_code == 3);
    std::remove("one_class.csv");

    write_file("bad.csv", "score,label\n0.1,banana\n");
    REQUIRE(run_cli("auc --input bad.csv").exit_code == 2);
    std::remove("bad.csv");

    REQUIRE(run_cli("auc --input no_such_file.csv").exit_code == 2);
}

TEST_CASE("run at huge epsilon agrees with auc") {
    write_file("ds.csv",
               "score,label\n0.05,0\n0.2,0\n0.3,1\n0.45,0\n0.6,1\n0.7,0\n0.85,1\n0.9,1\n");
    auto exact = run_cli("auc --input ds.csv");
    auto run = run_cli("run --input ds.csv --mechanism rr --epsilon 50 --clients 4");
    REQUIRE(run.exit_code == 0);
    // second line is the AUC; first is the config header
    auto nl = run.output.find('\n');
    std::string auc_line = run.output.substr(nl + 1);
    REQUIRE(std::stod(auc_line) == Catch::Approx(std::stod(exact.output)).margin(1e-4));
    std::remove("ds.csv");
}

TEST_CASE("adaptive with one sample per client runs") {
    auto r = run_cli(
        "run --synthetic m=16,pi=0.5,sep=2 --mechanism local-laplace-adaptive "
        "--epsilon 1 --clients 16");
    REQUIRE(r.exit_code == 0);
}

TEST_CASE("transcript contains no label key") {
    auto r = run_cli(
        "run --synthetic m=50,pi=0.4,sep=1 --mechanism local-laplace --epsilon 1 "
        "--clients 5 --transcript transcript.jsonl");
    REQUIRE(r.exit_code == 0);
    std::ifstream tf("transcript.jsonl");
    std::stringstream ss;
    ss << tf.rdbuf();
    REQUIRE(!ss.str().empty());
    REQUIRE(ss.str().find("label") == std::string::npos);
    std::remove("transcript.jsonl");
}

TEST_CASE("experiment reruns are byte-identical") {
    std::string args =
        "experiment --synthetic m=400,pi=0.3,sep=1 --mechanism local-laplace "
        "--epsilon 1 --clients 8 --trials 5 --seed 7";
    auto a = run_cli(args);
    auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.output == b.output);
    REQUIRE(a.output.rfind("# fedauc experiment seed=7", 0) == 0);
}

TEST_CASE("experiment sweep emits one row per grid point") {
    auto r = run_cli(
        "experiment --synthetic m=300,pi=0.3,sep=1 --mechanism local-laplace "
        "--epsilon 1 --clients 6 --trials 3 --sweep alpha=0.2:0.8:0.2");
    REQUIRE(r.exit_code == 0);
    int rows = 0;
    std::stringstream ss(r.output);
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind("local-laplace,", 0) == 0) ++rows;
    REQUIRE(rows == 4);  // 0.2, 0.4, 0.6, 0.8
}

TEST_CASE("predict-only emits predictors without running trials") {
    auto r = run_cli(
        "experiment --synthetic m=1000,pi=0.3,sep=1 --mechanism global-laplace "
        "--epsilon 1 --clients 10 --trials 100 --predict-only");
    REQUIRE(r.exit_code == 0);
    std::stringstream ss(r.output);
    std::string line, data;
    while (std::getline(ss, line))
        if (line.rfind("global-laplace,", 0) == 0) data = line;
    REQUIRE(!data.empty());
    // trials column reports 0 and predicted_std is nonzero
    REQUIRE(data.find(",0,") != std::string::npos);
}

TEST_CASE("invalid config exits 2") {
    REQUIRE(run_cli("run --synthetic m=100,pi=0.5,sep=1 --epsilon 0").exit_code == 2);
    REQUIRE(run_cli("run --synthetic m=100,pi=0.5,sep=1 --mechanism banana").exit_code == 2);
    REQUIRE(run_cli("experiment --synthetic m=100,pi=0.5,sep=1 --trials 1").exit_code == 2);
}
