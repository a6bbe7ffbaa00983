#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "pessimlab/algorithms.hpp"
#include "pessimlab/common.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/env.hpp"
#include "pessimlab/exact.hpp"

namespace pessimlab {

// log P(Bin(n,p) = k), stable for n up to 1e4.
inline Real log_binomial_pmf(std::uint64_t n, std::uint64_t k, Real p) {
    if (k > n) return -kInf;
    if (p <= 0) return k == 0 ? 0.0 : -kInf;
    if (p >= 1) return k == n ? 0.0 : -kInf;
    const Real nn = static_cast<Real>(n), kk = static_cast<Real>(k);
    return std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) +
           kk * std::log(p) + (nn - kk) * std::log1p(-p);
}

inline Real binomial_pmf(std::uint64_t n, std::uint64_t k, Real p) {
    const Real lp = log_binomial_pmf(n, k, p);
    return lp == -kInf ? 0.0 : std::exp(lp);
}

// ---------------------------------------------------------------------------
// Exact expected sub-optimality of a counts-based decision rule on a
// two-armed bandit, by full enumeration of the outcome distribution:
// n1 ~ Bin(N, mu1), k1 ~ Bin(n1, mean1), k2 ~ Bin(N - n1, mean2).
// Deterministic arms collapse their k-dimension.
// ---------------------------------------------------------------------------

// A decision rule seen through its sufficient statistics. Adapters below
// synthesize a dataset with exactly these statistics and run the production
// algorithms, so the enumeration exercises the same code path the Monte
// Carlo harness does.
using TwoArmRule =
    std::function<std::uint64_t(std::uint64_t n1, Real mean1, std::uint64_t n2, Real mean2)>;

inline Dataset synthesize_two_arm_dataset(std::uint64_t n1, Real mean1, std::uint64_t n2,
                                          Real mean2) {
    Dataset d;
    d.provenance = {"synthetic-two-arm", 0, n1 + n2};
    d.transitions.reserve(n1 + n2);
    for (std::uint64_t i = 0; i < n1; ++i)
        d.transitions.push_back({0, 0, mean1 == 0 ? 0.0 : mean1, -1});
    for (std::uint64_t i = 0; i < n2; ++i)
        d.transitions.push_back({0, 1, mean2 == 0 ? 0.0 : mean2, -1});
    return d;
}

// Note the synthesized records carry the arm's empirical mean as every
// reward; all bandit rules here depend on the data only through counts and
// sums, so this is faithful.
inline TwoArmRule lcb_mab_rule(const PenaltyParams& params, std::uint64_t n_total) {
    return [params, n_total](std::uint64_t n1, Real m1, std::uint64_t n2, Real m2) {
        Dataset d = synthesize_two_arm_dataset(n1, m1, n2, m2);
        d.provenance.n = n_total;
        return lcb_mab(d, 2, params);
    };
}

inline TwoArmRule empirical_best_arm_rule() {
    return [](std::uint64_t n1, Real m1, std::uint64_t n2, Real m2) {
        return empirical_best_arm(synthesize_two_arm_dataset(n1, m1, n2, m2), 2);
    };
}

inline TwoArmRule most_played_arm_rule() {
    return [](std::uint64_t n1, Real m1, std::uint64_t n2, Real m2) {
        return most_played_arm(synthesize_two_arm_dataset(n1, m1, n2, m2), 2);
    };
}

struct ExactTwoArmResult {
    Real sub_optimality = 0;
    Real outcome_probability_total = 0;  // should be 1 up to fp error
};

inline ExactTwoArmResult exact_two_arm_subopt(const BanditInstance& bandit, const TwoArmRule& rule,
                                              std::uint64_t n) {
    if (bandit.num_actions() != 2 || bandit.tail_count != 0)
        throw std::invalid_argument("exact_two_arm_subopt: needs exactly two explicit arms");
    if (n > 200) throw std::invalid_argument("exact_two_arm_subopt: N must be <= 200");
    for (int a = 0; a < 2; ++a) {
        const auto kind = bandit.head_rewards[a].kind();
        if (kind == RewardDistribution::Kind::Discrete)
            throw std::invalid_argument(
                "exact_two_arm_subopt: arms must be deterministic or bernoulli");
    }
    const Real mu1 = bandit.head_mu[0];
    const Real r1 = bandit.head_rewards[0].mean();
    const Real r2 = bandit.head_rewards[1].mean();
    const Real r_star = std::max(r1, r2);
    const bool bern1 = bandit.head_rewards[0].kind() == RewardDistribution::Kind::Bernoulli;
    const bool bern2 = bandit.head_rewards[1].kind() == RewardDistribution::Kind::Bernoulli;

    ExactTwoArmResult out;
    for (std::uint64_t n1 = 0; n1 <= n; ++n1) {
        const Real p_n1 = binomial_pmf(n, n1, mu1);
        if (p_n1 == 0) continue;
        const std::uint64_t n2 = n - n1;
        const std::uint64_t k1_max = bern1 ? n1 : 0;
        for (std::uint64_t k1 = 0; k1 <= k1_max; ++k1) {
            const Real p_k1 = bern1 ? binomial_pmf(n1, k1, r1) : 1.0;
            if (p_k1 == 0) continue;
            const Real mean1 = n1 == 0 ? 0.0
                              : bern1 ? static_cast<Real>(k1) / static_cast<Real>(n1)
                                      : r1;
            const std::uint64_t k2_max = bern2 ? n2 : 0;
            for (std::uint64_t k2 = 0; k2 <= k2_max; ++k2) {
                const Real p_k2 = bern2 ? binomial_pmf(n2, k2, r2) : 1.0;
                if (p_k2 == 0) continue;
                const Real mean2 = n2 == 0 ? 0.0
                                  : bern2 ? static_cast<Real>(k2) / static_cast<Real>(n2)
                                          : r2;
                const Real prob = p_n1 * p_k1 * p_k2;
                const std::uint64_t chosen = rule(n1, mean1, n2, mean2);
                out.outcome_probability_total += prob;
                out.sub_optimality += prob * (r_star - (chosen == 0 ? r1 : r2));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive policy search (oracle for exact_optimal_policy).
// ---------------------------------------------------------------------------
inline DeterministicPolicy exhaustive_optimal_policy(const DiscountedMdp& mdp) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    Real space = 1;
    for (std::size_t s = 0; s < S; ++s) space *= static_cast<Real>(A);
    if (space > 4096) throw std::invalid_argument("exhaustive_optimal_policy: |A|^S > 4096");

    DeterministicPolicy best;
    std::vector<Real> best_v;
    DeterministicPolicy pi;
    pi.action_of.assign(S, 0);
    const std::size_t count = static_cast<std::size_t>(space);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t x = idx;
        for (std::size_t s = 0; s < S; ++s) {
            pi.action_of[s] = static_cast<std::uint32_t>(x % A);
            x /= A;
        }
        const ValueTable vt = policy_evaluation(mdp, pi);
        if (best_v.empty()) {
            best = pi;
            best_v = vt.v;
            continue;
        }
        bool better_somewhere = false;
        for (std::size_t s = 0; s < S; ++s)
            if (vt.v[s] > best_v[s] + 1e-12 * mdp.v_max()) { better_somewhere = true; break; }
        if (better_somewhere) {
            // the simultaneous maximizer dominates pointwise, so keeping the
            // coordinate-wise max converges to it
            for (std::size_t s = 0; s < S; ++s)
                if (vt.v[s] > best_v[s]) { best_v[s] = vt.v[s]; best.action_of[s] = pi.action_of[s]; }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Monte Carlo policy evaluation by rollout.
// ---------------------------------------------------------------------------
struct McEstimate {
    Real mean = 0;
    Real stderr_ = 0;
    Real truncation_bias_bound = 0;
};

inline McEstimate mc_policy_value(const DiscountedMdp& mdp, const DeterministicPolicy& pi,
                                  std::size_t reps, std::size_t horizon_cap, std::uint64_t seed) {
    if (reps == 0) throw std::invalid_argument("mc_policy_value: reps must be >= 1");
    std::vector<std::vector<Real>> row_cdf(mdp.num_states * mdp.num_actions);
    for (std::size_t s = 0; s < mdp.num_states; ++s)
        for (std::size_t a = 0; a < mdp.num_actions; ++a) {
            const Real* p = mdp.row(s, a);
            row_cdf[s * mdp.num_actions + a] = cumulative({p, p + mdp.num_states});
        }
    const std::vector<Real> rho_cdf = cumulative(mdp.rho);
    std::vector<Real> returns(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng(mix64(seed, r));
        std::size_t s = sample_cdf(rho_cdf, rng.next_uniform());
        Real acc = 0, disc = 1;
        for (std::size_t t = 0; t < horizon_cap; ++t) {
            const std::size_t a = pi(s);
            acc += disc * mdp.rewards[s * mdp.num_actions + a].sample(rng.next_uniform());
            disc *= mdp.gamma;
            if (disc == 0) break;
            s = sample_cdf(row_cdf[s * mdp.num_actions + a], rng.next_uniform());
        }
        returns[r] = acc;
    }
    const MeanStderr m = mean_stderr(returns);
    McEstimate out;
    out.mean = m.mean;
    out.stderr_ = m.stderr_;
    out.truncation_bias_bound =
        std::pow(mdp.gamma, static_cast<Real>(horizon_cap)) / (1.0 - mdp.gamma);
    return out;
}

inline McEstimate mc_policy_value(const EpisodicMdp& emdp, const DeterministicPolicy& pi,
                                  std::size_t reps, std::uint64_t seed) {
    if (reps == 0) throw std::invalid_argument("mc_policy_value: reps must be >= 1");
    const std::size_t A = emdp.num_actions;
    const std::vector<Real> rho_cdf = cumulative(emdp.rho);
    std::vector<Real> returns(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng(mix64(seed, r));
        std::size_t local = sample_cdf(rho_cdf, rng.next_uniform());
        Real acc = 0;
        for (std::size_t h = 0; h < emdp.horizon; ++h) {
            const std::size_t global = emdp.level_offset(h) + local;
            const std::size_t a = pi(global);
            acc += emdp.rewards[h][local * A + a].sample(rng.next_uniform());
            if (h + 1 < emdp.horizon) {
                const Real* p = emdp.row(h, local, a);
                const std::vector<Real> cdf = cumulative({p, p + emdp.level_sizes[h + 1]});
                local = sample_cdf(cdf, rng.next_uniform());
            }
        }
        returns[r] = acc;
    }
    const MeanStderr m = mean_stderr(returns);
    return {m.mean, m.stderr_, 0.0};
}

// ---------------------------------------------------------------------------
// Binomial inverse moments: E[1/(n v 1)^k] for n ~ Bin(N, p).
// ---------------------------------------------------------------------------
struct InverseMomentResult {
    Real estimate = 0;  // Monte Carlo
    Real bound = 0;     // c_k / (Np)^k with c_{1/2} = 16
};

inline Real exact_inverse_moment(std::uint64_t n, Real p, Real k) {
    Real acc = 0;
    for (std::uint64_t i = 0; i <= n; ++i)
        acc += binomial_pmf(n, i, p) /
               std::pow(static_cast<Real>(std::max<std::uint64_t>(i, 1)), k);
    return acc;
}

inline InverseMomentResult inverse_moment_check(std::uint64_t n, Real p, Real k,
                                                std::size_t reps, std::uint64_t seed) {
    if (!(static_cast<Real>(n) * p > 0))
        throw std::invalid_argument("inverse_moment_check: Np must be positive");
    Real acc = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < n; ++i)
            if (uniform_at(mix64(seed, r), i) < p) ++hits;
        acc += 1.0 / std::pow(static_cast<Real>(std::max<std::uint64_t>(hits, 1)), k);
    }
    InverseMomentResult out;
    out.estimate = acc / static_cast<Real>(reps);
    const Real c_k = k == 0.5 ? 16.0
                              : 1.0 + k * std::pow(2.0, k + 1) + std::pow(k, k + 1) +
                                    k * std::pow(16.0 * (k + 1) / std::exp(1.0), k + 1);
    out.bound = c_k / std::pow(static_cast<Real>(n) * p, k);
    return out;
}

// ---------------------------------------------------------------------------
// Clean-event indicators.
// ---------------------------------------------------------------------------

// MAB: |rhat(a) - r(a)| <= b(a) for every arm simultaneously. Unobserved
// arms hold trivially (rhat = 0, b = 1, r in [0,1]).
inline bool clean_event_mab(const BanditInstance& bandit, const Dataset& data,
                            const PenaltyParams& params = {}) {
    const Real delta = params.resolved_delta(data.size());
    const Real l = params.override_L
                       ? *params.override_L
                       : mab_penalty_scale(static_cast<Real>(bandit.num_actions()), delta);
    for (const auto& [arm, st] : arm_stats(data)) {
        const Real r_hat = st.reward_sum / static_cast<Real>(st.count);
        const Real b = std::sqrt(l / (2.0 * static_cast<Real>(st.count)));
        if (std::abs(r_hat - bandit.reward_mean(arm)) > b) return false;
    }
    return true;
}

// CB: |rhat(s,a) - r(s,a)| <= b(s,a) for every pair.
inline bool clean_event_cb(const CbInstance& cb, const Dataset& data,
                           const PenaltyParams& params = {}) {
    const Real delta = params.resolved_delta(data.size());
    const Real l = params.override_L
                       ? *params.override_L
                       : cb_penalty_scale(static_cast<Real>(cb.num_states),
                                          static_cast<Real>(cb.num_actions), delta);
    std::vector<std::uint64_t> n(cb.num_states * cb.num_actions, 0);
    std::vector<Real> rsum(cb.num_states * cb.num_actions, 0.0);
    for (const Transition& t : data.transitions) {
        ++n[t.s * cb.num_actions + t.a];
        rsum[t.s * cb.num_actions + t.a] += t.r;
    }
    for (std::size_t cell = 0; cell < n.size(); ++cell) {
        if (n[cell] == 0) continue;
        const Real r_hat = rsum[cell] / static_cast<Real>(n[cell]);
        const Real b = std::sqrt(l / static_cast<Real>(n[cell]));
        if (std::abs(r_hat - cb.rewards[cell].mean()) > b) return false;
    }
    return true;
}

// MDP: |r(s,a) - r_t(s,a) + gamma (P_{s,a} - P^t_{s,a}) . V_{t-1}| <= b_t(s,a)
// for every (s,a,t), evaluated from a VI-LCB trace against the true model.
inline bool clean_event_mdp(const DiscountedMdp& mdp, const ViTrace& trace) {
    if (trace.r_t.empty() && trace.t_iterations > 0)
        throw std::invalid_argument("clean_event_mdp: trace was not recorded");
    const std::size_t S = trace.num_states, A = trace.num_actions;
    for (std::size_t t = 1; t <= trace.t_iterations; ++t) {
        const auto& r_t = trace.r_t[t - 1];
        const auto& p_t = trace.p_t[t - 1];
        const auto& b_t = trace.b_t[t - 1];
        const auto& v_prev = trace.v_t[t - 1];
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                const std::size_t cell = s * A + a;
                Real diff = mdp.reward_mean(s, a) - r_t[cell];
                const Real* p_true = mdp.row(s, a);
                for (std::size_t s2 = 0; s2 < S; ++s2)
                    diff += trace.gamma * (p_true[s2] - p_t[cell * S + s2]) * v_prev[s2];
                if (std::abs(diff) > b_t[cell]) return false;
            }
    }
    return true;
}

}  // namespace pessimlab
