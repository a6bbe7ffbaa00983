#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pessimlab/pessimlab.hpp"

using namespace pessimlab;

TEST_CASE("prop1 instance") {
    const HardInstance inst = prop1_instance(0.1, 500);
    const auto& b = std::get<BanditInstance>(inst.env);
    SECTION("declared coverage constant is exactly 1.1") {
        const Certification cert = certify(inst);
        CHECK(cert.ok);
        CHECK_THAT(cert.measured_c_star, Catch::Matchers::WithinAbs(1.1, 1e-12));
    }
    SECTION("the deterministic arm is optimal with gap 0.95 epsilon") {
        CHECK(b.optimal_arm() == 0);
        CHECK_THAT(b.reward_mean(0) - b.reward_mean(1),
                   Catch::Matchers::WithinAbs(0.095, 1e-15));
        CHECK(b.num_actions() == 500ull * 500ull * 500ull);
    }
    SECTION("parameter ranges are enforced") {
        CHECK_THROWS_AS(prop1_instance(0.35, 500), ConstructionError);
        CHECK_THROWS_AS(prop1_instance(0.1, 100), ConstructionError);
    }
}

TEST_CASE("le cam two-point pair") {
    SECTION("C* = 2 with the largest gap") {
        const auto [a, b] = lecam_two_arm(2.0, 0.25);
        const auto& bb = std::get<BanditInstance>(b.env);
        CHECK_THAT(bb.mu(1), Catch::Matchers::WithinAbs(0.5, 1e-15));
        CHECK_THAT(bb.reward_mean(0), Catch::Matchers::WithinAbs(0.5, 1e-15));
        CHECK_THAT(bb.reward_mean(1), Catch::Matchers::WithinAbs(0.75, 1e-15));
        CHECK(b.optimal_arm == 1);
        CHECK(certify(a).ok);
        CHECK(certify(b).ok);
    }
    SECTION("C* in (1,2) swaps the behavior distribution") {
        const auto [a, b] = lecam_two_arm(1.5, 0.2);
        const auto& ba = std::get<BanditInstance>(a.env);
        const auto& bb = std::get<BanditInstance>(b.env);
        CHECK_THAT(ba.mu(0), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
        CHECK_THAT(bb.mu(1), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
        CHECK(certify(a).ok);
        CHECK(certify(b).ok);
    }
    SECTION("zero gap collapses the reward distributions") {
        const auto [a, b] = lecam_two_arm(2.0, 0.0);
        const auto& ba = std::get<BanditInstance>(a.env);
        const auto& bb = std::get<BanditInstance>(b.env);
        CHECK(ba.reward_mean(1) == bb.reward_mean(1));
        CHECK(certify(a).ok);
        CHECK(certify(b).ok);
    }
    SECTION("C* <= 1 is rejected") {
        CHECK_THROWS_AS(lecam_two_arm(1.0, 0.1), ConstructionError);
    }
}

TEST_CASE("non-adaptivity pair") {
    const auto [a, b] = nonadaptivity_pair(2000, 9.0);
    const auto& ba = std::get<BanditInstance>(a.env);
    const auto& bb = std::get<BanditInstance>(b.env);
    CHECK_THAT(ba.mu(0), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(bb.mu(0), Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
    CHECK(certify(a).ok);
    CHECK(certify(b).ok);
    CHECK(a.declared_c_star == 1.5);
    CHECK(b.declared_c_star == 6.0);
}

TEST_CASE("gv codes") {
    SECTION("length two accepts every distinct sign vector") {
        const GvCode code = gv_code(2, 10000, 3);
        CHECK(code.codewords.size() == 4);
        CHECK(code.pairwise_min_l1 >= 1.0);
    }
    SECTION("the distance property holds by construction") {
        const GvCode code = gv_code(20, 20000, 5);
        REQUIRE(code.codewords.size() >= 2);
        for (std::size_t i = 0; i < code.codewords.size(); ++i)
            for (std::size_t j = i + 1; j < code.codewords.size(); ++j) {
                Real l1 = 0;
                for (std::size_t k = 0; k < 20; ++k)
                    l1 += std::abs(static_cast<Real>(code.codewords[i][k]) -
                                   static_cast<Real>(code.codewords[j][k]));
                CHECK(l1 >= 10.0);
            }
        CHECK(code.pairwise_min_l1 >= 10.0);
    }
}

TEST_CASE("contextual bandit fano family") {
    SECTION("C* = 2 at S = 4 puts mass 1/8 on the shifted action") {
        const HardInstance inst = cb_fano_member(4, 2.0, 0.25, {1, 1, -1, 1});
        const auto& cb = std::get<CbInstance>(inst.env);
        for (std::size_t s = 0; s < 4; ++s)
            CHECK_THAT(cb.mu[s * 2 + 1], Catch::Matchers::WithinAbs(0.125, 1e-15));
        CHECK(certify(inst).ok);
    }
    SECTION("every family member certifies") {
        const GvCode code = gv_code(8, 100000, 7);
        const auto family = cb_fano_family(8, 1.6, 0.2, code);
        for (const auto& member : family) CHECK(certify(member).ok);
    }
    SECTION("distinct members disagree on at least S/4 states") {
        const GvCode code = gv_code(8, 100000, 7, 6);
        const auto family = cb_fano_family(8, 2.5, 0.2, code);
        REQUIRE(family.size() >= 2);
        for (std::size_t i = 0; i < family.size(); ++i)
            for (std::size_t j = i + 1; j < family.size(); ++j) {
                std::size_t diffs = 0;
                for (std::size_t s = 0; s < 8; ++s)
                    if (family[i].optimal(s) != family[j].optimal(s)) ++diffs;
                CHECK(diffs >= 2);
            }
    }
}

TEST_CASE("most-played failure instance") {
    const HardInstance inst = cb_most_played_failure(1.5, 0.01);
    const auto& cb = std::get<CbInstance>(inst.env);
    SECTION("the rewarding action is drawn strictly less often") {
        CHECK(cb.mu[0] < cb.mu[1]);
    }
    SECTION("certifies at exactly the declared constant") {
        const Certification cert = certify(inst);
        CHECK(cert.ok);
        CHECK_THAT(cert.measured_c_star, Catch::Matchers::WithinAbs(1.5, 1e-12));
    }
    SECTION("the most played arm converges to the wrong action") {
        std::vector<Real> sub;
        for (std::uint64_t r = 0; r < 60; ++r) {
            const Dataset d = sample_dataset(cb, 50000, mix64(0x771, r));
            const DeterministicPolicy pi = behavior_cloning(d, 2, 2);
            sub.push_back(optimal_value(inst) - cb.value_of(pi));
        }
        const MeanStderr m = mean_stderr(sub);
        CHECK(m.mean >= 0.9 * (1.5 - 1.0 - 0.01));
    }
    SECTION("parameter ranges are enforced") {
        CHECK_THROWS_AS(cb_most_played_failure(2.5), ConstructionError);
        CHECK_THROWS_AS(cb_most_played_failure(1.5, 0.9), ConstructionError);
    }
}

TEST_CASE("expert-data contextual bandit") {
    const HardInstance inst = cb_expert(2, 1000);
    const Certification cert = certify(inst);
    CHECK(cert.ok);
    CHECK_THAT(cert.measured_c_star, Catch::Matchers::WithinAbs(1.0, 1e-12));
    const auto& cb = std::get<CbInstance>(inst.env);
    CHECK_THAT(cb.rho[0], Catch::Matchers::WithinAbs(1.0 / 1001.0, 1e-15));
    CHECK(inst.optimal(0) == 1);  // unobserved states default to the wrong action
}

TEST_CASE("hard MDP construction") {
    SECTION("absorption parameters at gamma = 0.5") {
        const HardInstance inst = mdp_hard(5, 0.5, 2.0, 0.25, {1});
        Real p = 0, q = -1;
        for (const auto& [k, v] : inst.metadata) {
            if (k == "p") p = v;
            if (k == "q") q = v;
        }
        CHECK_THAT(p, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
        CHECK_THAT(q, Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
    SECTION("certifies in both coverage regimes with behavior mass on the sink") {
        for (Real c : {1.3, 2.0, 5.0}) {
            const HardInstance inst = mdp_hard(17, 0.9, c, 0.25, {1, -1, 1, -1});
            CHECK(certify(inst).ok);
            const auto& m = std::get<MdpWithBehavior>(inst.env);
            CHECK(m.mu[(17 - 1) * 2] > 0);
        }
    }
    SECTION("rejects malformed parameters") {
        CHECK_THROWS_AS(mdp_hard(6, 0.9, 2.0, 0.25, {1}), ConstructionError);
        CHECK_THROWS_AS(mdp_hard(5, 0.3, 2.0, 0.25, {1}), ConstructionError);
        CHECK_THROWS_AS(mdp_hard(5, 0.9, 2.0, 0.4, {1}), ConstructionError);
        CHECK_THROWS_AS(mdp_hard(5, 0.9, 2.0, 0.25, {1, 1}), ConstructionError);
    }
}

TEST_CASE("imitation-hard MDP") {
    const HardInstance inst = imitation_hard_mdp(8, 200, 0.9);
    const auto& m = std::get<MdpWithBehavior>(inst.env);
    SECTION("expert data certifies at C* = 1") {
        const Certification cert = certify(inst);
        CHECK(cert.ok);
        CHECK_THAT(cert.measured_c_star, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    SECTION("the expert earns the full discounted return") {
        CHECK_THAT(expected_value(m.mdp, inst.optimal),
                   Catch::Matchers::WithinAbs(10.0, 1e-9));
    }
    SECTION("the bad state receives no initial mass") {
        CHECK(m.mdp.rho.back() == 0.0);
    }
}

TEST_CASE("episodic H = 3 instance") {
    SECTION("zero gaps make every policy optimal") {
        const HardInstance inst = episodic_h3({0.5, 0.5}, {0, 0, 0, 0, 0, 0}, 1.1);
        const auto& e = std::get<EpisodicWithBehavior>(inst.env);
        const Real j_star = optimal_value(inst);
        for (std::uint32_t mask = 0; mask < 64; ++mask) {
            DeterministicPolicy pi;
            for (std::size_t s = 0; s < 6; ++s) pi.action_of.push_back((mask >> s) & 1);
            CHECK_THAT(episodic_expected_value(e.emdp, pi),
                       Catch::Matchers::WithinAbs(j_star, 1e-12));
        }
        CHECK(certify(inst).ok);
    }
    SECTION("level-1 occupancy of the optimal action is rho/3") {
        const HardInstance inst = episodic_h3({0.25, 0.75}, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1}, 1.4);
        const auto& e = std::get<EpisodicWithBehavior>(inst.env);
        const OccupancyTable occ = episodic_occupancy(e.emdp, inst.optimal);
        CHECK_THAT(occ.d[0 * 2 + 0], Catch::Matchers::WithinAbs(0.25 / 3.0, 1e-12));
        CHECK_THAT(occ.d[1 * 2 + 0], Catch::Matchers::WithinAbs(0.75 / 3.0, 1e-12));
        CHECK(certify(inst).ok);
    }
    SECTION("the nine-to-one coverage constraint holds") {
        const HardInstance inst = episodic_h3({0.5, 0.5}, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1}, 1.8);
        const auto& e = std::get<EpisodicWithBehavior>(inst.env);
        for (std::size_t s = 0; s < 6; ++s)
            CHECK(e.mu[s * 2] >= 9.0 * e.mu[s * 2 + 1] - 1e-12);
    }
    SECTION("infeasible requests fail loudly") {
        CHECK_THROWS_AS(episodic_h3({0.5, 0.5}, {0.9, 0, 0, 0, 0, 0}, 1.1), ConstructionError);
        CHECK_THROWS_AS(episodic_h3({0.5, 0.5}, {0, 0, 0, 0, 0, 0}, 2.5), ConstructionError);
    }
}

TEST_CASE("probability tables stay valid across documented parameter ranges") {
    // exercised through validate(): every constructor output must pass
    for (Real c : {1.05, 1.5, 2.0, 4.0}) {
        if (c > 1) {
            const auto [a, b] = lecam_two_arm(c, 0.2);
            std::get<BanditInstance>(a.env).validate();
            std::get<BanditInstance>(b.env).validate();
        }
        if (c < 2 && c > 1) {
            std::get<CbInstance>(cb_most_played_failure(c).env).validate();
        }
        if (c > 1) {
            const HardInstance m = mdp_hard(9, 0.8, c, 0.2, {1, -1});
            std::get<MdpWithBehavior>(m.env).mdp.validate();
            check_probability_vector(std::get<MdpWithBehavior>(m.env).mu, 0, 18, "mu");
        }
    }
    std::get<BanditInstance>(prop1_instance(0.2, 700).env).validate();
    std::get<MdpWithBehavior>(imitation_hard_mdp(5, 99, 0.5).env).mdp.validate();
    const HardInstance h3 = episodic_h3({0.4, 0.6}, {0.1, 0, 0.2, 0.1, 0, 0}, 1.3);
    std::get<EpisodicWithBehavior>(h3.env).emdp.validate();
}
