#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fedauc/metrics.hpp"

using namespace fedauc;

TEST_CASE("rank_scores on sorted input") {
    std::vector<double> s{0.1, 0.35, 0.4, 0.8};
    auto r = rank_scores(s);
    REQUIRE(r.ranks == std::vector<int64_t>{0, 1, 2, 3});
}

TEST_CASE("rank_scores permutation of sorted case") {
    std::vector<double> s{0.8, 0.1, 0.4, 0.35};
    auto r = rank_scores(s);
    REQUIRE(r.ranks == std::vector<int64_t>{3, 0, 2, 1});
}

TEST_CASE("rank_scores tie broken by input index") {
    std::vector<double> s{0.5, 0.5};
    auto r = rank_scores(s);
    REQUIRE(r.ranks == std::vector<int64_t>{0, 1});
}

TEST_CASE("rank_scores rejects non-finite and short input") {
    std::vector<double> bad{0.1, std::nan("")};
    REQUIRE_THROWS_AS(rank_scores(bad), InvalidInputError);
    std::vector<double> single{0.3};
    REQUIRE_THROWS_AS(rank_scores(single), InvalidInputError);
}

TEST_CASE("auc_from_ranks matches hand-counted pairs") {
    std::vector<double> s{0.1, 0.35, 0.4, 0.8};
    std::vector<int> y{0, 1, 0, 1};
    auto r = rank_scores(s);
    REQUIRE(auc_from_ranks(r, y).value == Catch::Approx(0.75));
}

TEST_CASE("perfect separation gives AUC 1") {
    std::vector<double> s{0.1, 0.2, 0.8, 0.9};
    std::vector<int> y{0, 0, 1, 1};
    REQUIRE(auc_from_ranks(rank_scores(s), y).value == 1.0);
}

TEST_CASE("one-class labels rejected") {
    std::vector<double> s{0.1, 0.2};
    std::vector<int> all_pos{1, 1};
    REQUIRE_THROWS_AS(auc_from_ranks(rank_scores(s), all_pos), DegenerateLabelsError);
    REQUIRE_THROWS_AS(auc_pairwise_oracle(s, all_pos), DegenerateLabelsError);
}

TEST_CASE("pairwise oracle examples") {
    std::vector<double> s{0.1, 0.35, 0.4, 0.8};
    std::vector<int> y{0, 1, 0, 1};
    REQUIRE(auc_pairwise_oracle(s, y).value == Catch::Approx(0.75));

    std::vector<double> pair{0.2, 0.7};
    std::vector<int> y2{0, 1};
    REQUIRE(auc_pairwise_oracle(pair, y2).value == 1.0);

    std::vector<double> tied{0.5, 0.5};
    REQUIRE(auc_pairwise_oracle(tied, y2).value == 0.5);
}

namespace {

struct RandomInstance {
    std::vector<double> scores;
    std::vector<int> labels;
};

RandomInstance random_instance(std::mt19937_64& gen, size_t max_m, bool distinct) {
    std::uniform_int_distribution<size_t> m_dist(2, max_m);
    size_t m = m_dist(gen);
    RandomInstance inst;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::set<double> seen;
    for (size_t i = 0; i < m; ++i) {
        double s = u(gen);
        while (distinct && !seen.insert(s).second) s = u(gen);
        inst.scores.push_back(s);
    }
    // force 1 <= P <= M-1
    size_t p = std::uniform_int_distribution<size_t>(1, m - 1)(gen);
    inst.labels.assign(m, 0);
    for (size_t i = 0; i < p; ++i) inst.labels[i] = 1;
    std::shuffle(inst.labels.begin(), inst.labels.end(), gen);
    return inst;
}

}  // namespace

TEST_CASE("rank formula equals pairwise oracle on distinct scores") {
    std::mt19937_64 gen(7);
    for (int it = 0; it < 300; ++it) {
        auto inst = random_instance(gen, 200, true);
        double a = auc_from_ranks(rank_scores(inst.scores), inst.labels).value;
        double b = auc_pairwise_oracle(inst.scores, inst.labels).value;
        REQUIRE(a == Catch::Approx(b).margin(1e-12));
    }
}

TEST_CASE("rank_scores output is always a permutation") {
    std::mt19937_64 gen(9);
    for (int it = 0; it < 100; ++it) {
        auto inst = random_instance(gen, 200, false);
        auto r = rank_scores(inst.scores);
        std::vector<int64_t> sorted = r.ranks;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); ++i)
            REQUIRE(sorted[i] == static_cast<int64_t>(i));
    }
}

TEST_CASE("label-complement symmetry") {
    std::mt19937_64 gen(11);
    for (int it = 0; it < 100; ++it) {
        auto inst = random_instance(gen, 100, true);
        std::vector<int> flipped;
        for (int y : inst.labels) flipped.push_back(1 - y);
        double a = auc_from_ranks(rank_scores(inst.scores), inst.labels).value;
        double b = auc_from_ranks(rank_scores(inst.scores), flipped).value;
        REQUIRE(a == Catch::Approx(1.0 - b).margin(1e-12));
    }
}

TEST_CASE("AUC invariant under strictly monotone score transform") {
    std::mt19937_64 gen(13);
    for (int it = 0; it < 50; ++it) {
        auto inst = random_instance(gen, 100, true);
        std::vector<double> squashed;
        for (double s : inst.scores) squashed.push_back(s * s * s + 2.0 * s);
        double a = auc_from_ranks(rank_scores(inst.scores), inst.labels).value;
        double b = auc_from_ranks(rank_scores(squashed), inst.labels).value;
        REQUIRE(a == Catch::Approx(b).margin(1e-12));
    }
}

TEST_CASE("auc_from_global_stats clamps out-of-range values") {
    auto low = auc_from_global_stats(-100.0, 10.0, 10.0);
    REQUIRE(low.value == 0.0);
    REQUIRE(low.clamped);
    auto high = auc_from_global_stats(1e6, 10.0, 10.0);
    REQUIRE(high.value == 1.0);
    REQUIRE(high.clamped);
    REQUIRE_THROWS_AS(auc_from_global_stats(1.0, -1.0, 5.0), DegenerateLabelsError);
}
