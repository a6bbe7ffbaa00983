#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pessimlab/pessimlab.hpp"

using namespace pessimlab;

namespace {

BanditInstance two_thirds_bandit() {
    // C* = 1.5: the optimal arm is drawn with probability 2/3
    BanditInstance b;
    b.head_rewards = {RewardDistribution::deterministic(1.0),
                      RewardDistribution::deterministic(0.0)};
    b.head_mu = {2.0 / 3.0, 1.0 / 3.0};
    return b;
}

}  // namespace

TEST_CASE("exact two-arm enumeration") {
    SECTION("always picking the optimal arm has zero sub-optimality") {
        const auto res = exact_two_arm_subopt(
            two_thirds_bandit(), [](std::uint64_t, Real, std::uint64_t, Real) { return 0ull; },
            50);
        CHECK(res.sub_optimality == 0.0);
        CHECK_THAT(res.outcome_probability_total, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    SECTION("most played arm decays at the binomial-tail rate") {
        const Real kl = bernoulli_kl(0.5, 2.0 / 3.0);
        CHECK_THAT(kl, Catch::Matchers::WithinAbs(0.0589, 5e-5));
        // same constant via log(C*/2) + log(1/(C*-1))/2 at C* = 1.5
        CHECK_THAT(std::log(1.5 / 2.0) + std::log(1.0 / 0.5) / 2.0,
                   Catch::Matchers::WithinAbs(kl, 1e-12));
        for (std::uint64_t n : {20ull, 60ull, 120ull, 200ull}) {
            const auto res = exact_two_arm_subopt(two_thirds_bandit(), most_played_arm_rule(), n);
            CHECK(res.sub_optimality <= std::exp(-static_cast<Real>(n) * kl));
            CHECK_THAT(res.outcome_probability_total, Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("outcome probabilities always sum to one") {
        BanditInstance b;
        b.head_rewards = {RewardDistribution::bernoulli(0.8), RewardDistribution::bernoulli(0.3)};
        b.head_mu = {0.4, 0.6};
        for (std::uint64_t n : {1ull, 13ull, 57ull}) {
            PenaltyParams params;
            const auto res = exact_two_arm_subopt(b, lcb_mab_rule(params, n), n);
            CHECK_THAT(res.outcome_probability_total, Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("agrees with Monte Carlo sampling") {
        BanditInstance b;
        b.head_rewards = {RewardDistribution::bernoulli(0.7), RewardDistribution::bernoulli(0.5)};
        b.head_mu = {0.5, 0.5};
        const std::uint64_t n = 40;
        const auto exact = exact_two_arm_subopt(b, empirical_best_arm_rule(), n);
        std::vector<Real> vals(20000);
        for (std::size_t r = 0; r < vals.size(); ++r) {
            const Dataset d = sample_dataset(b, n, mix64(0xabcd, r));
            vals[r] = 0.7 - b.reward_mean(empirical_best_arm(d, 2));
        }
        const MeanStderr m = mean_stderr(vals);
        CHECK(std::abs(m.mean - exact.sub_optimality) <= 3 * m.stderr_);
    }
    SECTION("rejects unsupported shapes") {
        BanditInstance three;
        three.head_rewards.assign(3, RewardDistribution::bernoulli(0.5));
        three.head_mu.assign(3, 1.0 / 3.0);
        CHECK_THROWS_AS(exact_two_arm_subopt(three, most_played_arm_rule(), 10),
                        std::invalid_argument);
        BanditInstance discrete;
        discrete.head_rewards = {RewardDistribution::discrete({0.0, 0.5}, {0.5, 0.5}),
                                 RewardDistribution::bernoulli(0.5)};
        discrete.head_mu = {0.5, 0.5};
        CHECK_THROWS_AS(exact_two_arm_subopt(discrete, most_played_arm_rule(), 10),
                        std::invalid_argument);
        CHECK_THROWS_AS(exact_two_arm_subopt(two_thirds_bandit(), most_played_arm_rule(), 500),
                        std::invalid_argument);
    }
}

TEST_CASE("exhaustive policy search") {
    SECTION("single state reduces to a one-step argmax") {
        DiscountedMdp mdp;
        mdp.num_states = 1;
        mdp.num_actions = 3;
        mdp.gamma = 0.4;
        mdp.transition = {1, 1, 1};
        mdp.rewards = {RewardDistribution::deterministic(0.2),
                       RewardDistribution::deterministic(0.8),
                       RewardDistribution::deterministic(0.5)};
        mdp.rho = {1.0};
        CHECK(exhaustive_optimal_policy(mdp)(0) == 1);
    }
    SECTION("refuses oversized search spaces") {
        const DiscountedMdp mdp = random_mdp(1, 13, 2, 0.5);  // 2^13 > 4096
        CHECK_THROWS_AS(exhaustive_optimal_policy(mdp), std::invalid_argument);
    }
    SECTION("recovers the declared optimum of a hard instance") {
        const HardInstance inst = mdp_hard(5, 0.9, 2.0, 0.25, {1});
        const auto& m = std::get<MdpWithBehavior>(inst.env);
        const DeterministicPolicy pi = exhaustive_optimal_policy(m.mdp);
        CHECK(expected_value(m.mdp, pi) ==
              Catch::Approx(expected_value(m.mdp, inst.optimal)).margin(1e-9));
    }
}

TEST_CASE("Monte Carlo policy values") {
    SECTION("a deterministic chain matches its closed-form value") {
        DiscountedMdp mdp;
        mdp.num_states = 2;
        mdp.num_actions = 1;
        mdp.gamma = 0.9;
        mdp.transition = {0, 1, 0, 1};  // both go to state 1, which absorbs
        mdp.rewards = {RewardDistribution::deterministic(0.0),
                       RewardDistribution::deterministic(1.0)};
        mdp.rho = {1.0, 0.0};
        DeterministicPolicy pi;
        pi.action_of = {0, 0};
        const Real exact = 0.9 / (1 - 0.9);
        const McEstimate mc = mc_policy_value(mdp, pi, 200, 400, 3);
        CHECK(std::abs(mc.mean - exact) <= mc.truncation_bias_bound + 3 * mc.stderr_ + 1e-9);
    }
    SECTION("zero replications are rejected") {
        const DiscountedMdp mdp = random_mdp(1, 2, 2, 0.5);
        CHECK_THROWS_AS(mc_policy_value(mdp, random_policy(1, 2, 2), 0, 10, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("binomial inverse moments") {
    SECTION("p = 1 collapses to 1/N^k") {
        CHECK_THAT(exact_inverse_moment(100, 1.0, 0.5),
                   Catch::Matchers::WithinAbs(0.1, 1e-15));
        CHECK_THAT(exact_inverse_moment(10, 1.0, 1.0), Catch::Matchers::WithinAbs(0.1, 1e-15));
    }
    SECTION("the c_{1/2} = 16 bound holds across the documented grid") {
        for (std::uint64_t n : {10ull, 100ull, 1000ull, 10000ull})
            for (Real p : {0.05, 0.2, 0.5, 1.0}) {
                const Real exact = exact_inverse_moment(n, p, 0.5);
                CHECK(exact <= 16.0 / std::sqrt(static_cast<Real>(n) * p));
            }
        const InverseMomentResult r = inverse_moment_check(100, 0.5, 0.5, 2000, 5);
        CHECK(r.estimate <= 16.0 / std::sqrt(50.0));
    }
    SECTION("Monte Carlo matches exact summation") {
        const Real exact = exact_inverse_moment(200, 0.1, 0.5);
        const InverseMomentResult r = inverse_moment_check(200, 0.1, 0.5, 4000, 11);
        const Real se = std::sqrt(0.25 / 4000.0);
        CHECK(std::abs(r.estimate - exact) <= 3 * se);
    }
}

TEST_CASE("clean-event indicators") {
    SECTION("deterministic rewards with positive penalties are always clean") {
        CbInstance cb;
        cb.num_states = 2;
        cb.num_actions = 2;
        cb.rho = {0.5, 0.5};
        cb.rewards.assign(4, RewardDistribution::deterministic(0.7));
        cb.mu.assign(4, 0.25);
        const Dataset d = sample_dataset(cb, 200, 12);
        CHECK(clean_event_cb(cb, d));
        BanditInstance b;
        b.head_rewards.assign(2, RewardDistribution::deterministic(0.4));
        b.head_mu = {0.5, 0.5};
        CHECK(clean_event_mab(b, sample_dataset(b, 100, 13)));
    }
    SECTION("the MDP indicator requires a recorded trace") {
        const DiscountedMdp mdp = random_mdp(31, 3, 2, 0.5);
        ViTrace empty;
        empty.t_iterations = 4;
        CHECK_THROWS_AS(clean_event_mdp(mdp, empty), std::invalid_argument);
    }
    SECTION("a recorded trace evaluates cleanly under generous penalties") {
        const DiscountedMdp mdp = random_mdp(32, 3, 2, 0.5);
        const std::vector<Real> mu = random_behavior(32, 6);
        const Dataset d = sample_dataset(mdp, mu, 400, 14, "clean");
        ViTrace trace;
        vi_lcb(d, MdpShape{3, 2, 0.5}, {}, &trace);
        CHECK(clean_event_mdp(mdp, trace));
    }
}
