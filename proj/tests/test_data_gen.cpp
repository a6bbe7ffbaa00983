#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pessimlab/pessimlab.hpp"

using namespace pessimlab;

TEST_CASE("dataset sampling is reproducible and validates inputs") {
    const HardInstance inst = cb_most_played_failure(1.5, 0.01);
    const auto& cb = std::get<CbInstance>(inst.env);
    const Dataset a = sample_dataset(cb, 500, 1234);
    const Dataset b = sample_dataset(cb, 500, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.transitions[i].s == b.transitions[i].s);
        CHECK(a.transitions[i].a == b.transitions[i].a);
        CHECK(a.transitions[i].r == b.transitions[i].r);
    }
    CHECK_THROWS_AS(sample_dataset(cb, 0, 1), std::invalid_argument);
}

TEST_CASE("point-mass behavior with deterministic reward repeats one record") {
    CbInstance cb;
    cb.num_states = 2;
    cb.num_actions = 2;
    cb.rho = {1.0, 0.0};
    cb.rewards.assign(4, RewardDistribution::deterministic(0.3));
    cb.mu = {0.0, 1.0, 0.0, 0.0};
    const Dataset d = sample_dataset(cb, 50, 9);
    for (const Transition& t : d.transitions) {
        CHECK(t.s == 0);
        CHECK(t.a == 1);
        CHECK(t.r == 0.3);
    }
}

TEST_CASE("two-arm frequencies concentrate") {
    BanditInstance b;
    b.head_rewards = {RewardDistribution::bernoulli(0.5), RewardDistribution::bernoulli(0.5)};
    b.head_mu = {0.9, 0.1};
    const Dataset d = sample_dataset(b, 100000, 31);
    std::size_t first = 0;
    for (const Transition& t : d.transitions)
        if (t.a == 0) ++first;
    const Real freq = static_cast<Real>(first) / 100000.0;
    CHECK(freq > 0.89);
    CHECK(freq < 0.91);
}

TEST_CASE("sparse-tail sampling leaves sub-optimal arms nearly unique") {
    const HardInstance inst = prop1_instance(0.1, 500);
    const auto& b = std::get<BanditInstance>(inst.env);
    const std::size_t reps = 2000;
    std::size_t all_unique = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const Dataset d = sample_dataset(b, 500, mix64(0x11, r));
        bool unique = true;
        for (const auto& [arm, st] : arm_stats(d))
            if (arm != 0 && st.count > 1) { unique = false; break; }
        if (unique) ++all_unique;
    }
    const Real freq = static_cast<Real>(all_unique) / reps;
    const Real sigma = std::sqrt(0.998 * 0.002 / reps);
    CHECK(freq >= 0.998 - 3 * sigma);
}

TEST_CASE("counts tally exactly") {
    SECTION("empty dataset gives zeros") {
        Dataset d;
        const CountsTable c = counts(d, 3, 2);
        CHECK(c.total() == 0);
    }
    SECTION("identical records land in one cell") {
        Dataset d;
        for (int i = 0; i < 7; ++i) d.transitions.push_back({1, 1, 0.5, -1});
        const CountsTable c = counts(d, 2, 2);
        CHECK(c.at(1, 1) == 7);
        CHECK(c.total() == 7);
    }
    SECTION("sampled datasets conserve mass") {
        const HardInstance inst = cb_most_played_failure(1.3);
        const auto& cb = std::get<CbInstance>(inst.env);
        const Dataset d = sample_dataset(cb, 777, 5);
        CHECK(counts(d, cb.num_states, cb.num_actions).total() == 777);
    }
    SECTION("out-of-range records are rejected") {
        Dataset d;
        d.transitions.push_back({5, 0, 0.1, -1});
        CHECK_THROWS_AS(counts(d, 2, 2), MalformedDatasetError);
    }
}

TEST_CASE("fold splitting") {
    Dataset d;
    d.provenance = {"t", 17, 12};
    for (std::uint32_t i = 0; i < 12; ++i)
        d.transitions.push_back({i, 0, 0.0, -1});

    SECTION("N = 12, T = 2 gives three disjoint folds of four") {
        const auto folds = split_folds(d, 2, 3);
        REQUIRE(folds.size() == 3);
        std::set<std::uint32_t> seen;
        for (const auto& f : folds) {
            CHECK(f.size() == 4);
            for (const Transition& t : f.transitions) seen.insert(t.s);
        }
        CHECK(seen.size() == 12);
    }
    SECTION("a leftover record is discarded") {
        d.transitions.push_back({12, 0, 0.0, -1});
        const auto folds = split_folds(d, 2, 3);
        std::size_t total = 0;
        for (const auto& f : folds) total += f.size();
        CHECK(total == 12);
    }
    SECTION("too few records raise") {
        Dataset tiny;
        tiny.transitions.push_back({0, 0, 0.0, -1});
        CHECK_THROWS_AS(split_folds(tiny, 2, 3), InsufficientDataError);
    }
    SECTION("marginal inclusion probability is m(T+1)/N") {
        d.transitions.push_back({12, 0, 0.0, -1});  // N = 13, m = 4
        const std::size_t trials = 100000;
        std::size_t included = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            const auto folds = split_folds(d, 2, i);
            for (const auto& f : folds)
                for (const Transition& t : f.transitions)
                    if (t.s == 0) { ++included; break; }
        }
        const Real p = 12.0 / 13.0;
        const Real freq = static_cast<Real>(included) / trials;
        const Real sigma = std::sqrt(p * (1 - p) / trials);
        CHECK(std::abs(freq - p) <= 3 * sigma);
    }
}

TEST_CASE("concentrability ratios") {
    SECTION("expert data has constant one") {
        const DiscountedMdp mdp = random_mdp(3, 4, 2, 0.8);
        const DeterministicPolicy pi = random_policy(3, 4, 2);
        const OccupancyTable d = occupancy(mdp, pi);
        CHECK_THAT(concentrability(d, d.d), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    SECTION("point mass against half coverage doubles") {
        OccupancyTable d;
        d.d = {1.0, 0.0};
        CHECK_THAT(concentrability(d, {0.5, 0.5}), Catch::Matchers::WithinAbs(2.0, 1e-15));
    }
    SECTION("0/0 counts as zero and positive/0 as infinity") {
        OccupancyTable d;
        d.d = {0.0, 1.0};
        CHECK(concentrability(d, {0.0, 1.0}) == 1.0);
        d.d = {0.5, 0.5};
        CHECK(concentrability(d, {0.0, 1.0}) == kInf);
    }
    SECTION("uniform behavior bounds every policy by 1/mu_min") {
        const std::size_t S = 3, A = 3;
        const DiscountedMdp mdp = random_mdp(29, S, A, 0.9);
        const std::vector<Real> mu(S * A, 1.0 / static_cast<Real>(S * A));
        DeterministicPolicy pi;
        pi.action_of.assign(S, 0);
        for (std::size_t idx = 0; idx < 27; ++idx) {
            std::size_t x = idx;
            for (std::size_t s = 0; s < S; ++s) {
                pi.action_of[s] = static_cast<std::uint32_t>(x % A);
                x /= A;
            }
            CHECK(concentrability(occupancy(mdp, pi), mu) <= static_cast<Real>(S * A) + 1e-9);
        }
    }
}

TEST_CASE("dataset CSV round-trip with provenance sidecar") {
    const HardInstance inst = cb_most_played_failure(1.5);
    const auto& cb = std::get<CbInstance>(inst.env);
    const Dataset d = sample_dataset(cb, 64, 99, "cb_most_played_failure");
    const std::string csv = dataset_to_csv(d);
    const Json sidecar = provenance_to_json(d.provenance);
    const Dataset back = dataset_from_csv(csv, sidecar);
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(back.transitions[i].s == d.transitions[i].s);
        CHECK(back.transitions[i].a == d.transitions[i].a);
        CHECK(back.transitions[i].r == d.transitions[i].r);
        CHECK(back.transitions[i].s_next == d.transitions[i].s_next);
    }
    CHECK(back.provenance.seed == 99);
}
