#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pessimlab/common.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/env.hpp"
#include "pessimlab/exact.hpp"

namespace pessimlab {

struct MdpWithBehavior {
    DiscountedMdp mdp;
    std::vector<Real> mu;  // S*A
};

struct EpisodicWithBehavior {
    EpisodicMdp emdp;
    std::vector<Real> mu;  // (total states)*A
};

using Environment = std::variant<BanditInstance, CbInstance, MdpWithBehavior, EpisodicWithBehavior>;

// A constructed environment together with its declared coverage constant
// and optimal policy. `c_star_is_exact` distinguishes constructions whose
// measured constant equals the declared one from those where the family
// only guarantees membership (measured <= declared).
struct HardInstance {
    std::string id;
    Environment env;
    Real declared_c_star = 1;
    bool c_star_is_exact = true;
    DeterministicPolicy optimal;       // empty for bandits
    std::uint64_t optimal_arm = 0;     // bandits only
    std::vector<std::pair<std::string, Real>> metadata;

    bool is_bandit() const { return std::holds_alternative<BanditInstance>(env); }
};

// ---------------------------------------------------------------------------
// Evaluation against the declared optimum.
// ---------------------------------------------------------------------------

inline Real optimal_value(const HardInstance& inst) {
    if (const auto* b = std::get_if<BanditInstance>(&inst.env))
        return b->reward_mean(inst.optimal_arm);
    if (const auto* cb = std::get_if<CbInstance>(&inst.env)) return cb->value_of(inst.optimal);
    if (const auto* m = std::get_if<MdpWithBehavior>(&inst.env))
        return expected_value(m->mdp, inst.optimal);
    const auto& e = std::get<EpisodicWithBehavior>(inst.env);
    return episodic_expected_value(e.emdp, inst.optimal);
}

inline Real policy_value(const HardInstance& inst, const DeterministicPolicy& pi) {
    if (const auto* cb = std::get_if<CbInstance>(&inst.env)) return cb->value_of(pi);
    if (const auto* m = std::get_if<MdpWithBehavior>(&inst.env))
        return expected_value(m->mdp, pi);
    const auto& e = std::get<EpisodicWithBehavior>(inst.env);
    return episodic_expected_value(e.emdp, pi);
}

inline Real arm_value(const HardInstance& inst, std::uint64_t arm) {
    return std::get<BanditInstance>(inst.env).reward_mean(arm);
}

// Measured single-policy concentrability of the declared optimal policy.
inline Real measured_c_star(const HardInstance& inst) {
    if (const auto* b = std::get_if<BanditInstance>(&inst.env)) {
        const Real mu_star = b->mu(inst.optimal_arm);
        return mu_star > 0 ? 1.0 / mu_star : kInf;
    }
    if (const auto* cb = std::get_if<CbInstance>(&inst.env)) {
        OccupancyTable d;
        d.d.assign(cb->num_states * cb->num_actions, 0.0);
        for (std::size_t s = 0; s < cb->num_states; ++s)
            d.d[s * cb->num_actions + inst.optimal(s)] = cb->rho[s];
        return concentrability(d, cb->mu);
    }
    if (const auto* m = std::get_if<MdpWithBehavior>(&inst.env))
        return concentrability(occupancy(m->mdp, inst.optimal), m->mu);
    const auto& e = std::get<EpisodicWithBehavior>(inst.env);
    return concentrability(episodic_occupancy(e.emdp, inst.optimal), e.mu);
}

struct Certification {
    bool ok = true;
    Real measured_c_star = 0;
    Real optimal_value_gap = 0;  // J(exact optimum) - J(declared optimum)
    std::string detail;
};

// Verifies the declared coverage constant (exactly, or as an upper bound for
// membership-only constructions) and that the declared policy attains the
// optimal value.
inline Certification certify(const HardInstance& inst, Real tol = 1e-9) {
    Certification cert;
    cert.measured_c_star = measured_c_star(inst);
    if (inst.c_star_is_exact) {
        if (std::abs(cert.measured_c_star - inst.declared_c_star) > tol) {
            cert.ok = false;
            cert.detail = "measured C* deviates from declared";
        }
    } else if (cert.measured_c_star > inst.declared_c_star + tol) {
        cert.ok = false;
        cert.detail = "measured C* exceeds declared bound";
    }

    if (const auto* b = std::get_if<BanditInstance>(&inst.env)) {
        cert.optimal_value_gap = b->reward_mean(b->optimal_arm()) - b->reward_mean(inst.optimal_arm);
    } else if (const auto* cb = std::get_if<CbInstance>(&inst.env)) {
        cert.optimal_value_gap = cb->value_of(cb->optimal_policy()) - cb->value_of(inst.optimal);
    } else if (const auto* m = std::get_if<MdpWithBehavior>(&inst.env)) {
        const auto [pi, vt] = exact_optimal_policy(m->mdp);
        cert.optimal_value_gap = expected_value(m->mdp, vt) - expected_value(m->mdp, inst.optimal);
    } else {
        const auto& e = std::get<EpisodicWithBehavior>(inst.env);
        const auto [pi, levels] = episodic_optimal_policy(e.emdp);
        Real j_star = 0;
        for (std::size_t s = 0; s < e.emdp.level_sizes[0]; ++s)
            j_star += e.emdp.rho[s] * levels[0].v[s];
        cert.optimal_value_gap = j_star - episodic_expected_value(e.emdp, inst.optimal);
    }
    if (std::abs(cert.optimal_value_gap) > tol) {
        cert.ok = false;
        cert.detail += std::string(cert.detail.empty() ? "" : "; ") +
                       "declared optimal policy is not value-optimal";
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Bandit constructions.
// ---------------------------------------------------------------------------

// Failure instance for the empirical best arm: |A| = N^3 arms, one
// deterministic arm drawn with probability 1/1.1 and a shared sparse tail.
inline HardInstance prop1_instance(Real epsilon, std::uint64_t n) {
    if (!(epsilon > 0 && epsilon < 0.3)) throw ConstructionError("prop1: epsilon must be in (0,0.3)");
    if (n < 500) throw ConstructionError("prop1: N must be >= 500");
    if (n > 2000000) throw ConstructionError("prop1: N^3 overflows the arm index space");
    const std::uint64_t num_arms = n * n * n;
    BanditInstance b;
    b.head_rewards = {RewardDistribution::deterministic(2 * epsilon)};
    b.head_mu = {1.0 / 1.1};
    b.tail_count = num_arms - 1;
    b.tail_mu_each = (1.0 - 1.0 / 1.1) / static_cast<Real>(num_arms - 1);
    b.tail_reward = RewardDistribution::discrete({0.0, 2.1 * epsilon}, {0.5, 0.5});
    HardInstance inst;
    inst.id = "prop1";
    inst.env = std::move(b);
    inst.declared_c_star = 1.1;
    inst.c_star_is_exact = true;
    inst.optimal_arm = 0;
    inst.metadata = {{"epsilon", epsilon}, {"n", static_cast<Real>(n)},
                     {"gap", 0.95 * epsilon}};
    return inst;
}

// Le Cam two-point pair. For C* >= 2 the two instances share the behavior
// distribution and differ in the second arm's mean; for C* in (1,2) the
// behavior distribution is swapped between them.
inline std::pair<HardInstance, HardInstance> lecam_two_arm(Real c_star, Real gap) {
    if (!(c_star > 1)) throw ConstructionError("lecam_two_arm: C* must exceed 1");
    if (!(gap >= 0 && gap <= 0.25)) throw ConstructionError("lecam_two_arm: gap must lie in [0,1/4]");
    // `intended` is the construction's designated optimal arm; at gap = 0
    // both means coincide and the designation resolves the tie toward the
    // covered arm.
    auto make = [&](std::vector<Real> mu, Real mean0, Real mean1, const char* id,
                    std::uint64_t intended) {
        BanditInstance b;
        b.head_rewards = {RewardDistribution::bernoulli(mean0), RewardDistribution::bernoulli(mean1)};
        b.head_mu = std::move(mu);
        HardInstance inst;
        inst.id = id;
        inst.optimal_arm = intended;
        const Real actual = 1.0 / b.head_mu[intended];
        inst.env = std::move(b);
        inst.declared_c_star = c_star;
        inst.c_star_is_exact = std::abs(actual - c_star) < 1e-12;
        inst.metadata = {{"c_star", c_star}, {"gap", gap}};
        return inst;
    };
    if (c_star >= 2) {
        const std::vector<Real> mu = {1.0 - 1.0 / c_star, 1.0 / c_star};
        return {make(mu, 0.5, 0.5 - gap, "lecam_a", 0), make(mu, 0.5, 0.5 + gap, "lecam_b", 1)};
    }
    return {make({1.0 / c_star, 1.0 - 1.0 / c_star}, 0.5 + gap, 0.5, "lecam_a", 0),
            make({1.0 - 1.0 / c_star, 1.0 / c_star}, 0.5, 0.5 + gap, "lecam_b", 1)};
}

// The two instances behind the LCB non-adaptivity result: C* = 1.5 with a
// deterministic optimal arm, and C* = 6 with a noisy optimal arm. The gap g
// is tied to the penalty scale the experiment probes.
inline std::pair<HardInstance, HardInstance> nonadaptivity_pair(std::uint64_t n, Real l) {
    if (n == 0 || !(l > 0)) throw ConstructionError("nonadaptivity_pair: need N >= 1 and L > 0");
    HardInstance a;
    {
        const Real mu_sub = 1.0 - 1.0 / 1.5;
        const Real g = std::min(1.0 / 3.0, std::sqrt(l / (2.0 * static_cast<Real>(n) * mu_sub)));
        BanditInstance b;
        b.head_rewards = {RewardDistribution::deterministic(0.5),
                          RewardDistribution::bernoulli(0.5 - g)};
        b.head_mu = {1.0 / 1.5, mu_sub};
        a.id = "nonadaptivity_a";
        a.env = std::move(b);
        a.declared_c_star = 1.5;
        a.c_star_is_exact = true;
        a.optimal_arm = 0;
        a.metadata = {{"g", g}, {"n", static_cast<Real>(n)}, {"l", l}};
    }
    HardInstance bst;
    {
        const Real g = std::min(0.5, std::sqrt(l / (4.0 * static_cast<Real>(n))));
        BanditInstance b;
        b.head_rewards = {RewardDistribution::bernoulli(0.5),
                          RewardDistribution::deterministic(0.5 - g)};
        b.head_mu = {1.0 / 6.0, 5.0 / 6.0};
        bst.id = "nonadaptivity_b";
        bst.env = std::move(b);
        bst.declared_c_star = 6.0;
        bst.c_star_is_exact = true;
        bst.optimal_arm = 0;
        bst.metadata = {{"g", g}, {"n", static_cast<Real>(n)}, {"l", l}};
    }
    return {std::move(a), std::move(bst)};
}

// ---------------------------------------------------------------------------
// Gilbert-Varshamov style sign codes by rejection sampling: every accepted
// codeword keeps l1 distance >= S/2 (i.e. Hamming distance >= S/4) from all
// earlier ones. The distance property is enforced; the achievable size is
// whatever the tries allow.
// ---------------------------------------------------------------------------
struct GvCode {
    std::size_t length = 0;
    std::vector<std::vector<std::int8_t>> codewords;  // entries are +1/-1
    Real pairwise_min_l1 = 0;
    std::size_t tries_used = 0;
};

inline GvCode gv_code(std::size_t s, std::size_t max_tries, std::uint64_t seed = 1,
                      std::size_t max_codewords = 0) {
    if (s < 2) throw ConstructionError("gv_code: S must be >= 2");
    const std::size_t words = (s + 63) / 64;
    const std::size_t min_hamming = (s + 3) / 4;  // ceil(S/4) <=> l1 >= S/2
    std::vector<std::vector<std::uint64_t>> accepted;
    GvCode code;
    code.length = s;
    Rng rng(mix64(seed, 0x67766376ull));
    std::size_t tries = 0;
    for (; tries < max_tries; ++tries) {
        std::vector<std::uint64_t> cand(words, 0);
        for (std::size_t w = 0; w < words; ++w) cand[w] = rng.next_u64();
        if (s % 64 != 0) cand[words - 1] &= (std::uint64_t(1) << (s % 64)) - 1;
        bool ok = true;
        for (const auto& prev : accepted) {
            std::size_t ham = 0;
            for (std::size_t w = 0; w < words; ++w)
                ham += static_cast<std::size_t>(std::popcount(cand[w] ^ prev[w]));
            if (ham < min_hamming) { ok = false; break; }
        }
        if (!ok) continue;
        accepted.push_back(cand);
        std::vector<std::int8_t> v(s);
        for (std::size_t i = 0; i < s; ++i)
            v[i] = (cand[i / 64] >> (i % 64)) & 1 ? std::int8_t(1) : std::int8_t(-1);
        code.codewords.push_back(std::move(v));
        if (max_codewords > 0 && code.codewords.size() >= max_codewords) { ++tries; break; }
    }
    code.tries_used = tries;
    code.pairwise_min_l1 = static_cast<Real>(2 * min_hamming);
    if (code.codewords.size() >= 2) {
        std::size_t best = s + 1;
        for (std::size_t i = 0; i < accepted.size(); ++i)
            for (std::size_t j = i + 1; j < accepted.size(); ++j) {
                std::size_t ham = 0;
                for (std::size_t w = 0; w < words; ++w)
                    ham += static_cast<std::size_t>(std::popcount(accepted[i][w] ^ accepted[j][w]));
                best = std::min(best, ham);
            }
        code.pairwise_min_l1 = static_cast<Real>(2 * best);
    }
    return code;
}

// ---------------------------------------------------------------------------
// Contextual bandit constructions.
// ---------------------------------------------------------------------------

// One member of the Fano family indexed by a sign vector v: per state,
// action 0 pays Bern(1/2) and action 1 pays Bern(1/2 + v_s * gap).
inline HardInstance cb_fano_member(std::size_t s_states, Real c_star, Real gap,
                                   const std::vector<std::int8_t>& v) {
    if (s_states < 2) throw ConstructionError("cb_fano: S must be >= 2");
    if (!(gap > 0 && gap < 1.0 / 3.0)) throw ConstructionError("cb_fano: gap must lie in (0,1/3)");
    if (v.size() != s_states) throw ConstructionError("cb_fano: sign vector length mismatch");
    if (!(c_star > 1)) throw ConstructionError("cb_fano: C* must exceed 1");
    CbInstance cb;
    cb.num_actions = 2;
    const Real s_real = static_cast<Real>(s_states);
    if (c_star >= 2) {
        cb.num_states = s_states;
        cb.rho.assign(s_states, 1.0 / s_real);
        for (std::size_t s = 0; s < s_states; ++s) {
            cb.rewards.push_back(RewardDistribution::bernoulli(0.5));
            cb.rewards.push_back(RewardDistribution::bernoulli(0.5 + static_cast<Real>(v[s]) * gap));
            cb.mu.push_back(1.0 / s_real - 1.0 / (s_real * c_star));
            cb.mu.push_back(1.0 / (s_real * c_star));
        }
    } else {
        // extra zero-reward state, at index 0, holding the surplus mass
        cb.num_states = s_states + 1;
        cb.rho.assign(cb.num_states, (c_star - 1.0) / s_real);
        cb.rho[0] = 2.0 - c_star;
        cb.rewards.push_back(RewardDistribution::deterministic(0.0));
        cb.rewards.push_back(RewardDistribution::deterministic(0.0));
        cb.mu.push_back((2.0 - c_star) / c_star);
        cb.mu.push_back(0.0);
        for (std::size_t s = 0; s < s_states; ++s) {
            cb.rewards.push_back(RewardDistribution::bernoulli(0.5));
            cb.rewards.push_back(RewardDistribution::bernoulli(0.5 + static_cast<Real>(v[s]) * gap));
            cb.mu.push_back((c_star - 1.0) / (s_real * c_star));
            cb.mu.push_back((c_star - 1.0) / (s_real * c_star));
        }
    }
    HardInstance inst;
    inst.id = "cb_fano_member";
    inst.optimal = cb.optimal_policy();
    const bool any_plus = [&] {
        for (std::int8_t x : v)
            if (x > 0) return true;
        return false;
    }();
    inst.env = std::move(cb);
    inst.declared_c_star = c_star;
    // the +1 coordinates pin the ratio at exactly C*; in the (1,2) regime the
    // zero state does so unconditionally
    inst.c_star_is_exact = c_star < 2 || any_plus;
    inst.metadata = {{"gap", gap}, {"c_star", c_star}};
    return inst;
}

inline std::vector<HardInstance> cb_fano_family(std::size_t s_states, Real c_star, Real gap,
                                                const GvCode& code) {
    std::vector<HardInstance> family;
    family.reserve(code.codewords.size());
    for (const auto& v : code.codewords) family.push_back(cb_fano_member(s_states, c_star, gap, v));
    return family;
}

// The contextual bandit on which the most played arm stalls at C*-1-eps:
// the rewarding action is drawn slightly less often than its competitor.
inline HardInstance cb_most_played_failure(Real c_star, Real epsilon = -1) {
    if (!(c_star > 1 && c_star < 2))
        throw ConstructionError("cb_most_played_failure: C* must lie in (1,2)");
    if (epsilon < 0) epsilon = std::min(0.01, (c_star - 1.0) / 10.0);
    if (!(epsilon > 0 && epsilon < c_star - 1))
        throw ConstructionError("cb_most_played_failure: epsilon must lie in (0, C*-1)");
    CbInstance cb;
    cb.num_states = 2;
    cb.num_actions = 2;
    cb.rho = {c_star - 1.0 - epsilon, 2.0 - c_star + epsilon};
    cb.rewards = {RewardDistribution::deterministic(1.0), RewardDistribution::deterministic(0.0),
                  RewardDistribution::deterministic(0.0), RewardDistribution::deterministic(0.0)};
    cb.mu = {(c_star - 1.0 - epsilon) / c_star, (c_star - 1.0) / c_star,
             (2.0 - c_star + epsilon) / c_star, 0.0};
    HardInstance inst;
    inst.id = "cb_most_played_failure";
    inst.optimal = cb.optimal_policy();
    inst.env = std::move(cb);
    inst.declared_c_star = c_star;
    inst.c_star_is_exact = true;
    inst.metadata = {{"epsilon", epsilon}, {"c_star", c_star}};
    return inst;
}

// Expert-data contextual bandit (C* = 1): the behavior distribution sits
// exactly on the optimal actions, and all but one state carry initial mass
// 1/(N+1), so the missing-mass error scales like 1/N at sample size N.
inline HardInstance cb_expert(std::size_t s_states, std::uint64_t n_design, Real gap = 1.0) {
    if (s_states < 2) throw ConstructionError("cb_expert: S must be >= 2");
    if (n_design == 0) throw ConstructionError("cb_expert: N must be >= 1");
    if (!(gap > 0 && gap <= 1)) throw ConstructionError("cb_expert: gap must lie in (0,1]");
    const Real zeta = 1.0 / (static_cast<Real>(n_design) + 1.0);
    if (static_cast<Real>(s_states - 1) * zeta >= 1.0)
        throw ConstructionError("cb_expert: too many states for this N");
    CbInstance cb;
    cb.num_states = s_states;
    cb.num_actions = 2;
    cb.rho.assign(s_states, zeta);
    cb.rho[s_states - 1] = 1.0 - static_cast<Real>(s_states - 1) * zeta;
    for (std::size_t s = 0; s < s_states; ++s) {
        // optimal action is index 1, so an unobserved state defaults wrong
        cb.rewards.push_back(RewardDistribution::deterministic(0.0));
        cb.rewards.push_back(RewardDistribution::deterministic(gap));
        cb.mu.push_back(0.0);
        cb.mu.push_back(cb.rho[s]);
    }
    HardInstance inst;
    inst.id = "cb_expert";
    inst.optimal = cb.optimal_policy();
    inst.env = std::move(cb);
    inst.declared_c_star = 1.0;
    inst.c_star_is_exact = true;
    inst.metadata = {{"n_design", static_cast<Real>(n_design)}, {"gap", gap}};
    return inst;
}

// ---------------------------------------------------------------------------
// Discounted MDP constructions.
// ---------------------------------------------------------------------------

// Hard MDP made of four-state replicas plus one absorbing zero state. Each
// replica funnels the agent through a two-action decision state s1 whose
// better action is encoded by the sign v_j. Layout per replica j:
// 4j = s0, 4j+1 = s1, 4j+2 = s_plus, 4j+3 = s_minus; the last state is the
// absorbing s_{-1}.
inline HardInstance mdp_hard(std::size_t s_total, Real gamma, Real c_star, Real gap,
                             const std::vector<std::int8_t>& v) {
    if (s_total < 5 || (s_total - 1) % 4 != 0)
        throw ConstructionError("mdp_hard: S must be a multiple of 4 plus 1");
    if (!(gamma >= 0.5 && gamma < 1)) throw ConstructionError("mdp_hard: gamma must lie in [0.5,1)");
    if (!(c_star > 1)) throw ConstructionError("mdp_hard: C* must exceed 1");
    if (!(gap >= 0 && gap <= 0.25)) throw ConstructionError("mdp_hard: gap must lie in [0,1/4]");
    const std::size_t replicas = (s_total - 1) / 4;
    if (v.size() != replicas) throw ConstructionError("mdp_hard: sign vector length mismatch");
    const Real sp = static_cast<Real>(s_total - 1);  // state count across replicas

    const Real p = 1.0 / (2.0 - gamma);        // so that sum gamma^{i+1}(1-p)p^i = gamma/2
    const Real q = (2.0 * gamma - 1.0) / gamma;  // so that 1 - gamma q = 2(1-gamma)

    DiscountedMdp mdp;
    mdp.num_states = s_total;
    mdp.num_actions = 2;
    mdp.gamma = gamma;
    mdp.transition.assign(s_total * 2 * s_total, 0.0);
    mdp.rewards.assign(s_total * 2, RewardDistribution::deterministic(0.0));
    mdp.rho.assign(s_total, 0.0);
    const std::size_t sink = s_total - 1;
    for (std::size_t j = 0; j < replicas; ++j) {
        const std::size_t s0 = 4 * j, s1 = 4 * j + 1, plus = 4 * j + 2, minus = 4 * j + 3;
        for (std::size_t a = 0; a < 2; ++a) {
            Real* row0 = mdp.row(s0, a);
            row0[s0] = p;
            row0[s1] = 1.0 - p;
            Real* rowp = mdp.row(plus, a);
            rowp[plus] = q;
            rowp[s0] = 1.0 - q;
            Real* rowm = mdp.row(minus, a);
            rowm[minus] = q;
            rowm[s0] = 1.0 - q;
            mdp.rewards[plus * 2 + a] = RewardDistribution::deterministic(1.0);
        }
        const Real shift = static_cast<Real>(v[j]) * gap;
        Real* row1a = mdp.row(s1, 0);
        row1a[plus] = 0.5;
        row1a[minus] = 0.5;
        Real* row1b = mdp.row(s1, 1);
        row1b[plus] = 0.5 + shift;
        row1b[minus] = 0.5 - shift;
    }
    for (std::size_t a = 0; a < 2; ++a) mdp.row(sink, a)[sink] = 1.0;

    const bool low_regime = c_star < 2;
    const Real rho_each = low_regime ? 4.0 * (c_star - 1.0) / sp : 4.0 / sp;
    for (std::size_t j = 0; j < replicas; ++j) mdp.rho[4 * j] = rho_each;
    if (low_regime) mdp.rho[sink] = 2.0 - c_star;

    // closed-form occupancy of the optimal policy, per replica
    const Real d_s0 = 2.0 * rho_each / (2.0 + gamma);
    const Real d_s1 = d_s0 * gamma * (1.0 - gamma) / (2.0 - gamma);
    std::vector<Real> mu(s_total * 2, 0.0);
    Real allocated = 0;
    for (std::size_t j = 0; j < replicas; ++j) {
        const std::size_t s0 = 4 * j, s1 = 4 * j + 1, plus = 4 * j + 2, minus = 4 * j + 3;
        mu[s0 * 2] = d_s0 / c_star;
        const Real wide = gamma / (2.0 * (1.0 - gamma)) * d_s1 / (low_regime ? 1.0 : c_star);
        mu[plus * 2] = 0.75 * wide;
        mu[minus * 2] = 0.5 * wide;
        if (low_regime) {
            mu[s1 * 2] = d_s1 / c_star;
            mu[s1 * 2 + 1] = d_s1 / c_star;
        } else {
            mu[s1 * 2] = d_s1 * (1.0 - 1.0 / c_star);
            mu[s1 * 2 + 1] = d_s1 / c_star;
        }
        allocated += mu[s0 * 2] + mu[s1 * 2] + mu[s1 * 2 + 1] + mu[plus * 2] + mu[minus * 2];
    }
    if (allocated >= 1.0)
        throw ConstructionError("mdp_hard: no behavior mass left for the sink state");
    mu[sink * 2] = 1.0 - allocated;

    HardInstance inst;
    inst.id = "mdp_hard";
    inst.optimal.action_of.assign(s_total, 0);
    for (std::size_t j = 0; j < replicas; ++j)
        if (v[j] > 0 && gap > 0) inst.optimal.action_of[4 * j + 1] = 1;
    inst.env = MdpWithBehavior{std::move(mdp), std::move(mu)};
    inst.declared_c_star = c_star;
    inst.c_star_is_exact = true;
    inst.metadata = {{"gamma", gamma}, {"gap", gap}, {"p", p}, {"q", q},
                     {"d_s0", d_s0}, {"d_s1", d_s1}};
    return inst;
}

// Expert-data MDP (C* = 1): the optimal action renews the state from rho
// with reward 1, anything else falls into an absorbing bad state. All but
// one live state carry initial mass 1/(N+1).
inline HardInstance imitation_hard_mdp(std::size_t s_total, std::uint64_t n_design, Real gamma,
                                       std::size_t num_actions = 2, std::uint64_t seed = 7) {
    if (s_total < 3) throw ConstructionError("imitation_hard_mdp: S must be >= 3");
    if (num_actions < 2) throw ConstructionError("imitation_hard_mdp: need >= 2 actions");
    if (!(gamma >= 0 && gamma < 1)) throw ConstructionError("imitation_hard_mdp: bad gamma");
    const Real zeta = 1.0 / (static_cast<Real>(n_design) + 1.0);
    if (static_cast<Real>(s_total - 2) * zeta >= 1.0)
        throw ConstructionError("imitation_hard_mdp: too many states for this N");
    const std::size_t bad = s_total - 1;

    DiscountedMdp mdp;
    mdp.num_states = s_total;
    mdp.num_actions = num_actions;
    mdp.gamma = gamma;
    mdp.transition.assign(s_total * num_actions * s_total, 0.0);
    mdp.rewards.assign(s_total * num_actions, RewardDistribution::deterministic(0.0));
    mdp.rho.assign(s_total, zeta);
    mdp.rho[s_total - 2] = 1.0 - static_cast<Real>(s_total - 2) * zeta;
    mdp.rho[bad] = 0.0;

    DeterministicPolicy pi_star;
    pi_star.action_of.resize(s_total, 0);
    Rng rng(mix64(seed, 0x696d6974ull));
    for (std::size_t s = 0; s + 1 < s_total; ++s)
        pi_star.action_of[s] = static_cast<std::uint32_t>(rng.next_below(num_actions));
    for (std::size_t s = 0; s < s_total; ++s)
        for (std::size_t a = 0; a < num_actions; ++a) {
            Real* row = mdp.row(s, a);
            if (s != bad && a == pi_star(s)) {
                for (std::size_t t = 0; t < s_total; ++t) row[t] = mdp.rho[t];
                mdp.rewards[s * num_actions + a] = RewardDistribution::deterministic(1.0);
            } else {
                row[bad] = 1.0;
            }
        }

    std::vector<Real> mu(occupancy(mdp, pi_star).d);
    HardInstance inst;
    inst.id = "imitation_hard_mdp";
    inst.optimal = pi_star;
    inst.env = MdpWithBehavior{std::move(mdp), std::move(mu)};
    inst.declared_c_star = 1.0;
    inst.c_star_is_exact = true;
    inst.metadata = {{"n_design", static_cast<Real>(n_design)}, {"gamma", gamma}};
    return inst;
}

// ---------------------------------------------------------------------------
// Episodic H = 3 construction: two states per level, two actions, action 0
// optimal everywhere, deterministic rewards realizing the requested gaps
// g_h(s) = Q*_h(s,0) - Q*_h(s,1), and a behavior distribution with
// mu(s, optimal) >= 9 mu(s, other) whose coverage constant stays below the
// requested C*.
// ---------------------------------------------------------------------------
inline HardInstance episodic_h3(const std::vector<Real>& rho, const std::vector<Real>& gaps,
                                Real c_star) {
    if (rho.size() != 2) throw ConstructionError("episodic_h3: rho must have 2 entries");
    if (gaps.size() != 6) throw ConstructionError("episodic_h3: need 6 gaps (level-major)");
    if (!(c_star >= 1 && c_star < 2)) throw ConstructionError("episodic_h3: C* must lie in [1,2)");
    for (Real g : gaps)
        if (!(g >= 0 && g <= 0.5))
            throw ConstructionError("episodic_h3: gaps must lie in [0,0.5]");

    EpisodicMdp emdp;
    emdp.horizon = 3;
    emdp.num_actions = 2;
    emdp.level_sizes = {2, 2, 2};
    emdp.rho = rho;
    check_probability_vector(emdp.rho, 0, 2, "episodic_h3 rho");
    // both actions move uniformly to the next level, so gaps are realized
    // purely through rewards
    emdp.transition.assign(2, std::vector<Real>(2 * 2 * 2, 0.5));
    for (std::size_t h = 0; h < 3; ++h) {
        std::vector<RewardDistribution> r;
        for (std::size_t s = 0; s < 2; ++s) {
            r.push_back(RewardDistribution::deterministic(0.5));
            r.push_back(RewardDistribution::deterministic(0.5 - gaps[h * 2 + s]));
        }
        emdp.rewards.push_back(std::move(r));
    }

    const Real beta = std::min(c_star - 1.0, 1.0 / 9.0);
    std::vector<Real> d_opt = {rho[0] / 3.0, rho[1] / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0,
                               1.0 / 6.0};
    std::vector<Real> mu(6 * 2, 0.0);
    for (std::size_t s = 0; s < 6; ++s) {
        mu[s * 2] = d_opt[s] / (1.0 + beta);
        mu[s * 2 + 1] = beta * d_opt[s] / (1.0 + beta);
    }

    HardInstance inst;
    inst.id = "episodic_h3";
    inst.optimal.action_of.assign(6, 0);
    inst.env = EpisodicWithBehavior{std::move(emdp), std::move(mu)};
    inst.declared_c_star = c_star;
    inst.c_star_is_exact = std::abs((1.0 + beta) - c_star) < 1e-12;
    inst.metadata = {{"c_star", c_star}, {"beta", beta}};
    return inst;
}

}  // namespace pessimlab
