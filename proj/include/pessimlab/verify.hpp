#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pessimlab/algorithms.hpp"
#include "pessimlab/common.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/exact.hpp"
#include "pessimlab/harness.hpp"
#include "pessimlab/instances.hpp"
#include "pessimlab/oracles.hpp"

namespace pessimlab {

struct CheckResult {
    std::string name;
    bool pass = false;
    Real margin = 0;  // how far inside the requirement the measurement landed
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    std::string to_string() const {
        std::ostringstream out;
        for (const auto& c : checks)
            out << (c.pass ? "PASS" : "FAIL") << "  " << suite << '/' << c.name
                << "  margin=" << c.margin << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
        return out.str();
    }
};

// ---------------------------------------------------------------------------
// Random model generators (seeded, counter-based).
// ---------------------------------------------------------------------------

inline DiscountedMdp random_mdp(std::uint64_t seed, std::size_t s, std::size_t a, Real gamma) {
    Rng rng(mix64(seed, 0x726d6470ull));
    DiscountedMdp mdp;
    mdp.num_states = s;
    mdp.num_actions = a;
    mdp.gamma = gamma;
    mdp.transition.resize(s * a * s);
    for (std::size_t row = 0; row < s * a; ++row) {
        Real total = 0;
        for (std::size_t t = 0; t < s; ++t) {
            const Real e = -std::log(1.0 - rng.next_uniform());
            mdp.transition[row * s + t] = e;
            total += e;
        }
        for (std::size_t t = 0; t < s; ++t) mdp.transition[row * s + t] /= total;
    }
    for (std::size_t cell = 0; cell < s * a; ++cell)
        mdp.rewards.push_back(RewardDistribution::bernoulli(rng.next_uniform()));
    mdp.rho.resize(s);
    Real total = 0;
    for (std::size_t t = 0; t < s; ++t) {
        mdp.rho[t] = -std::log(1.0 - rng.next_uniform());
        total += mdp.rho[t];
    }
    for (std::size_t t = 0; t < s; ++t) mdp.rho[t] /= total;
    return mdp;
}

inline std::vector<Real> random_behavior(std::uint64_t seed, std::size_t cells) {
    Rng rng(mix64(seed, 0x6d750000ull));
    std::vector<Real> mu(cells);
    Real total = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        mu[i] = 0.05 + rng.next_uniform();  // keep every cell reachable
        total += mu[i];
    }
    for (std::size_t i = 0; i < cells; ++i) mu[i] /= total;
    return mu;
}

inline DeterministicPolicy random_policy(std::uint64_t seed, std::size_t s, std::size_t a) {
    Rng rng(mix64(seed, 0x706f6cull));
    DeterministicPolicy pi;
    pi.action_of.resize(s);
    for (std::size_t i = 0; i < s; ++i)
        pi.action_of[i] = static_cast<std::uint32_t>(rng.next_below(a));
    return pi;
}

// ---------------------------------------------------------------------------
// VI-LCB invariant batch: runs vi_lcb with a trace on random MDPs and
// evaluates, under the clean event, the monotone chain
// V_{t-1} <= V_t <= V^{pi_t} <= V*, the penalized-backup upper bound
// Q_t <= r + gamma P V_{t-1}, and the value-difference bound
// J(pi*) - J(pi_t) <= gamma^t/(1-gamma) + 2 sum_i nu_{t-i} . b_i.
// ---------------------------------------------------------------------------

struct ViInvariantStats {
    std::size_t runs = 0;
    std::size_t clean_runs = 0;
    std::size_t moved_runs = 0;  // clean runs whose value function left zero
    std::size_t chain_violations = 0;
    std::size_t backup_violations = 0;
    std::size_t recursion_violations = 0;
    std::size_t value_difference_violations = 0;
    Real worst_chain_slack = 0;  // most negative margin observed
};

inline ViInvariantStats vi_invariant_batch(std::size_t runs, std::uint64_t seed, std::size_t max_s,
                                           std::size_t max_a, Real gamma, std::uint64_t n,
                                           const PenaltyParams& params, Real slack = 1e-9) {
    ViInvariantStats stats;
    stats.runs = runs;
    for (std::size_t run = 0; run < runs; ++run) {
        const std::uint64_t run_seed = mix64(seed, run);
        const std::size_t s = 2 + rand_at(run_seed, 1) % (max_s - 1);
        const std::size_t a = 2 + rand_at(run_seed, 2) % (max_a - 1);
        const DiscountedMdp mdp = random_mdp(run_seed, s, a, gamma);
        const std::vector<Real> mu = random_behavior(run_seed, s * a);
        Dataset data = sample_dataset(mdp, mu, n, mix64(run_seed, 3), "vi-invariants");

        ViTrace trace;
        vi_lcb(data, MdpShape{s, a, gamma}, params, &trace);
        if (!clean_event_mdp(mdp, trace)) continue;
        ++stats.clean_runs;
        for (Real v : trace.v_t.back())
            if (v > 0) { ++stats.moved_runs; break; }

        const auto [pi_star, vt_star] = exact_optimal_policy(mdp);
        const ValueTable q_star = policy_evaluation(mdp, pi_star);
        const Real j_star = expected_value(mdp, vt_star);
        const Real v_max = mdp.v_max();

        // nu^{pi*}_k = gamma^k rho^{pi*} (P^{pi*})^k over state-action cells
        std::vector<std::vector<Real>> nu(trace.t_iterations);
        if (trace.t_iterations > 0) {
            std::vector<Real> state_marg(mdp.rho);
            Real scale = 1.0;
            for (std::size_t k = 0; k < trace.t_iterations; ++k) {
                nu[k].assign(s * a, 0.0);
                for (std::size_t st = 0; st < s; ++st)
                    nu[k][st * a + pi_star(st)] = scale * state_marg[st];
                std::vector<Real> next(s, 0.0);
                for (std::size_t st = 0; st < s; ++st) {
                    const Real* p = mdp.row(st, pi_star(st));
                    for (std::size_t t2 = 0; t2 < s; ++t2) next[t2] += state_marg[st] * p[t2];
                }
                state_marg.swap(next);
                scale *= gamma;
            }
        }

        bool chain_bad = false, backup_bad = false, recursion_bad = false, vd_bad = false;
        std::vector<Real> q_prev(s * a, 0.0);  // Q_0 = 0
        for (std::size_t t = 1; t <= trace.t_iterations; ++t) {
            const auto& v_prev = trace.v_t[t - 1];
            const auto& v_cur = trace.v_t[t];
            const ValueTable vt_pi = policy_evaluation(mdp, trace.pi_t[t]);
            for (std::size_t st = 0; st < s; ++st) {
                const Real m1 = v_cur[st] - v_prev[st];
                const Real m2 = vt_pi.v[st] - v_cur[st];
                const Real m3 = vt_star.v[st] - vt_pi.v[st];
                const Real worst = std::min({m1, m2, m3});
                stats.worst_chain_slack = std::min(stats.worst_chain_slack, worst);
                if (worst < -slack) chain_bad = true;
            }
            const auto& q_t = trace.q_t[t - 1];
            const auto& b_t = trace.b_t[t - 1];
            for (std::size_t st = 0; st < s && !backup_bad; ++st)
                for (std::size_t ac = 0; ac < a; ++ac) {
                    const Real* p = mdp.row(st, ac);
                    Real bound = mdp.reward_mean(st, ac);
                    for (std::size_t t2 = 0; t2 < s; ++t2) bound += gamma * p[t2] * v_prev[t2];
                    if (q_t[st * a + ac] > bound + slack) { backup_bad = true; break; }
                }
            // Q* - Q_t <= gamma P^{pi*} (Q* - Q_{t-1}) + 2 b_t
            for (std::size_t st = 0; st < s && !recursion_bad; ++st)
                for (std::size_t ac = 0; ac < a; ++ac) {
                    const Real* p = mdp.row(st, ac);
                    Real rhs = 2 * b_t[st * a + ac];
                    for (std::size_t t2 = 0; t2 < s; ++t2)
                        rhs += gamma * p[t2] *
                               (q_star.q[t2 * a + pi_star(t2)] - q_prev[t2 * a + pi_star(t2)]);
                    const Real lhs = q_star.q[st * a + ac] - q_t[st * a + ac];
                    if (lhs > rhs + slack) { recursion_bad = true; break; }
                }
            // value difference at iteration t
            Real penalty_sum = 0;
            for (std::size_t i = 1; i <= t; ++i) {
                const auto& b_i = trace.b_t[i - 1];
                const auto& nu_k = nu[t - i];
                for (std::size_t cell = 0; cell < s * a; ++cell)
                    penalty_sum += nu_k[cell] * b_i[cell];
            }
            const Real bound = std::pow(gamma, static_cast<Real>(t)) * v_max + 2 * penalty_sum;
            const Real j_t = expected_value(mdp, vt_pi);
            if (j_star - j_t > bound + slack) vd_bad = true;
            q_prev = q_t;
        }
        if (chain_bad) ++stats.chain_violations;
        if (backup_bad) ++stats.backup_violations;
        if (recursion_bad) ++stats.recursion_violations;
        if (vd_bad) ++stats.value_difference_violations;
    }
    return stats;
}

// Hoeffding-calibrated penalty scales (the tightest L for which the clean
// events still hold with probability >= 1 - delta).
inline Real hoeffding_cb_scale(std::size_t s, std::size_t a, Real delta) {
    return std::log(2.0 * static_cast<Real>(s * a) / delta) / 2.0;
}
inline Real hoeffding_vi_scale(std::size_t t_plus_1, std::size_t s, std::size_t a, Real delta) {
    return std::log(2.0 * static_cast<Real>(t_plus_1 * s * a) / delta) / 2.0;
}

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

inline VerifyReport verify_env() {
    VerifyReport report{"env", {}};
    const Real gammas[] = {0.5, 0.9, 0.99};
    Real worst_bellman = 0, worst_flow = 0, worst_j = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const std::uint64_t seed = mix64(0xe11, i);
        const std::size_t s = 2 + rand_at(seed, 10) % 19;  // <= 20
        const std::size_t a = 2 + rand_at(seed, 11) % 4;   // <= 5
        const Real gamma = gammas[i % 3];
        const DiscountedMdp mdp = random_mdp(seed, s, a, gamma);
        const DeterministicPolicy pi = random_policy(seed, s, a);
        const ValueTable vt = policy_evaluation(mdp, pi);
        for (std::size_t st = 0; st < s; ++st) {
            const Real* p = mdp.row(st, pi(st));
            Real backup = mdp.reward_mean(st, pi(st));
            for (std::size_t t2 = 0; t2 < s; ++t2) backup += gamma * p[t2] * vt.v[t2];
            worst_bellman = std::max(worst_bellman, std::abs(backup - vt.v[st]) / mdp.v_max());
        }
        const OccupancyTable occ = occupancy(mdp, pi);
        // flow residual: d(s') = (1-g) rho^pi(s') + g sum_s d(s) P(s'|s)
        std::vector<Real> inflow(s * a, 0.0);
        for (std::size_t st = 0; st < s; ++st) {
            const Real* p = mdp.row(st, pi(st));
            for (std::size_t t2 = 0; t2 < s; ++t2)
                inflow[t2 * a + pi(t2)] += occ.d[st * a + pi(st)] * p[t2];
        }
        for (std::size_t st = 0; st < s; ++st)
            for (std::size_t ac = 0; ac < a; ++ac) {
                const Real rho_pi = ac == pi(st) ? mdp.rho[st] : 0.0;
                const Real rhs = (1 - gamma) * rho_pi + gamma * inflow[st * a + ac];
                worst_flow = std::max(worst_flow, std::abs(occ.d[st * a + ac] - rhs));
            }
        Real j_from_occ = 0;
        for (std::size_t cell = 0; cell < s * a; ++cell)
            j_from_occ += occ.d[cell] * mdp.rewards[cell].mean();
        j_from_occ /= (1 - gamma);
        worst_j = std::max(worst_j, std::abs(j_from_occ - expected_value(mdp, vt)));
    }
    report.checks.push_back({"bellman_residual_1e-10Vmax", worst_bellman <= 1e-10,
                             1e-10 - worst_bellman, ""});
    report.checks.push_back({"occupancy_flow_1e-9", worst_flow <= 1e-9, 1e-9 - worst_flow, ""});
    report.checks.push_back(
        {"value_occupancy_identity_1e-8", worst_j <= 1e-8, 1e-8 - worst_j, ""});

    // optimal policy dominates every enumerable policy pointwise
    Real worst_dom = 0;
    bool greedy_matches = true;
    for (std::size_t i = 0; i < 200; ++i) {
        const std::uint64_t seed = mix64(0x0b7, i);
        const std::size_t s = i % 2 == 0 ? 3 : 2;
        const std::size_t a = i % 2 == 0 ? 2 : 3;
        const DiscountedMdp mdp = random_mdp(seed, s, a, 0.9);
        const auto [pi_star, vt_star] = exact_optimal_policy(mdp);
        const DeterministicPolicy pi_enum = exhaustive_optimal_policy(mdp);
        if (!(pi_enum == pi_star)) greedy_matches = false;
        std::size_t total = 1;
        for (std::size_t k = 0; k < s; ++k) total *= a;
        DeterministicPolicy pi;
        pi.action_of.assign(s, 0);
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t x = idx;
            for (std::size_t k = 0; k < s; ++k) { pi.action_of[k] = static_cast<std::uint32_t>(x % a); x /= a; }
            const ValueTable vt = policy_evaluation(mdp, pi);
            for (std::size_t st = 0; st < s; ++st)
                worst_dom = std::max(worst_dom, vt.v[st] - vt_star.v[st]);
        }
    }
    report.checks.push_back(
        {"optimal_dominates_enumeration", worst_dom <= 1e-9 && greedy_matches,
         1e-9 - worst_dom, greedy_matches ? "" : "greedy policy disagreed with enumeration"});

    // k-step occupancies: mass gamma^k, monotone partial sums converging to
    // d/(1-gamma)
    Real worst_kstep = 0;
    bool monotone_ok = true;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::uint64_t seed = mix64(0x257, i);
        const DiscountedMdp mdp = random_mdp(seed, 5, 2, 0.9);
        const DeterministicPolicy pi = random_policy(seed, 5, 2);
        const OccupancyTable occ = occupancy(mdp, pi);
        std::vector<Real> partial(occ.d.size(), 0.0);
        Real prev_mass = 0;
        for (std::size_t k = 0; k < 2000; ++k) {
            const OccupancyTable nu = k_step_occupancy(mdp, pi, k);
            const Real mass = nu.total_mass();
            worst_kstep = std::max(worst_kstep,
                                   std::abs(mass - std::pow(mdp.gamma, static_cast<Real>(k))));
            for (std::size_t c = 0; c < partial.size(); ++c) partial[c] += nu.d[c];
            Real cum = 0;
            for (Real x : partial) cum += x;
            if (cum + 1e-12 < prev_mass) monotone_ok = false;
            prev_mass = cum;
            if (mass < 1e-13) break;
        }
        for (std::size_t c = 0; c < partial.size(); ++c)
            worst_kstep = std::max(worst_kstep,
                                   std::abs(partial[c] - occ.d[c] / (1 - mdp.gamma)));
    }
    report.checks.push_back({"kstep_partial_sums_converge", worst_kstep <= 1e-8 && monotone_ok,
                             1e-8 - worst_kstep, ""});
    return report;
}

inline VerifyReport verify_clean_events() {
    VerifyReport report{"clean_events", {}};
    const std::size_t reps = 10000;
    const Real delta = 0.1;

    // MAB, default Hoeffding penalty
    {
        BanditInstance b;
        b.head_rewards = {RewardDistribution::bernoulli(0.7), RewardDistribution::bernoulli(0.5),
                          RewardDistribution::bernoulli(0.3)};
        b.head_mu = {0.5, 0.3, 0.2};
        PenaltyParams params;
        params.delta = delta;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const Dataset d = sample_dataset(b, 200, mix64(0xc1ea0, r));
            if (clean_event_mab(b, d, params)) ++hits;
        }
        const Real freq = static_cast<Real>(hits) / reps;
        const Real sigma = std::sqrt((1 - delta) * delta / reps);
        report.checks.push_back({"mab_frequency", freq >= 1 - delta - 3 * sigma,
                                 freq - (1 - delta - 3 * sigma), "freq=" + std::to_string(freq)});
    }
    // CB with the Hoeffding-calibrated penalty (the verbatim constant is
    // far looser, so this is the binding case)
    {
        const HardInstance inst = cb_most_played_failure(1.5, 0.01);
        const auto& cb = std::get<CbInstance>(inst.env);
        PenaltyParams params;
        params.delta = delta;
        params.override_L = hoeffding_cb_scale(cb.num_states, cb.num_actions, delta);
        std::size_t hits = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const Dataset d = sample_dataset(cb, 400, mix64(0xc1ea1, r));
            if (clean_event_cb(cb, d, params)) ++hits;
        }
        const Real freq = static_cast<Real>(hits) / reps;
        const Real sigma = std::sqrt((1 - delta) * delta / reps);
        report.checks.push_back({"cb_frequency", freq >= 1 - delta - 3 * sigma,
                                 freq - (1 - delta - 3 * sigma), "freq=" + std::to_string(freq)});
    }
    // MDP clean event from VI-LCB traces, Hoeffding-calibrated penalty
    {
        const Real gamma = 0.5;
        const std::uint64_t n = 400;
        const std::size_t t_iters = vi_lcb_iterations(n, gamma);
        PenaltyParams params;
        params.delta = delta;
        params.override_L = hoeffding_vi_scale(t_iters + 1, 4, 2, delta);
        std::size_t hits = 0;
        const DiscountedMdp mdp = random_mdp(0xabc, 4, 2, gamma);
        const std::vector<Real> mu = random_behavior(0xabc, 8);
        for (std::size_t r = 0; r < reps; ++r) {
            const Dataset d = sample_dataset(mdp, mu, n, mix64(0xc1ea2, r), "clean-mdp");
            ViTrace trace;
            vi_lcb(d, MdpShape{4, 2, gamma}, params, &trace);
            if (clean_event_mdp(mdp, trace)) ++hits;
        }
        const Real freq = static_cast<Real>(hits) / reps;
        const Real sigma = std::sqrt((1 - delta) * delta / reps);
        report.checks.push_back({"mdp_frequency", freq >= 1 - delta - 3 * sigma,
                                 freq - (1 - delta - 3 * sigma), "freq=" + std::to_string(freq)});
    }
    return report;
}

inline VerifyReport verify_contraction() {
    VerifyReport report{"contraction", {}};
    // batch 1: the documented configuration (gamma = 0.9)
    {
        PenaltyParams params;
        params.override_L = hoeffding_vi_scale(vi_lcb_iterations(1200, 0.9) + 1, 8, 3, 1.0 / 1200);
        const ViInvariantStats st = vi_invariant_batch(1000, 0x901, 8, 3, 0.9, 1200, params);
        report.checks.push_back({"chain_gamma09",
                                 st.chain_violations == 0 && st.backup_violations == 0 &&
                                     st.recursion_violations == 0,
                                 st.worst_chain_slack + 1e-9,
                                 "clean_runs=" + std::to_string(st.clean_runs)});
    }
    // batch 2: short horizon and a tight penalty, so the updates actually
    // fire and the clean event occasionally fails
    {
        PenaltyParams params;
        params.override_L = 1.0;
        const ViInvariantStats st = vi_invariant_batch(1000, 0x902, 6, 3, 0.2, 2000, params);
        report.checks.push_back({"chain_gamma02_tightL",
                                 st.chain_violations == 0 && st.backup_violations == 0 &&
                                     st.recursion_violations == 0 && st.moved_runs > 0,
                                 st.worst_chain_slack + 1e-9,
                                 "clean_runs=" + std::to_string(st.clean_runs) +
                                     " moved=" + std::to_string(st.moved_runs)});
    }
    return report;
}

inline VerifyReport verify_value_difference() {
    VerifyReport report{"value_difference", {}};
    {
        PenaltyParams params;
        params.override_L = hoeffding_vi_scale(vi_lcb_iterations(1200, 0.9) + 1, 8, 3, 1.0 / 1200);
        const ViInvariantStats st = vi_invariant_batch(500, 0x903, 8, 3, 0.9, 1200, params);
        report.checks.push_back({"bound_gamma09", st.value_difference_violations == 0, 0,
                                 "clean_runs=" + std::to_string(st.clean_runs)});
    }
    {
        PenaltyParams params;
        params.override_L = 1.0;
        const ViInvariantStats st = vi_invariant_batch(500, 0x904, 6, 3, 0.2, 2000, params);
        report.checks.push_back({"bound_gamma02_tightL", st.value_difference_violations == 0, 0,
                                 "clean_runs=" + std::to_string(st.clean_runs) +
                                     " moved=" + std::to_string(st.moved_runs)});
    }
    return report;
}

inline VerifyReport verify_oracles() {
    VerifyReport report{"oracles", {}};
    // Monte Carlo rollout vs exact policy value on 100 random MDPs
    {
        bool ok = true;
        Real worst = kInf;
        for (std::size_t i = 0; i < 100; ++i) {
            const DiscountedMdp mdp = random_mdp(mix64(0x0ca, i), 4, 2, 0.5);
            const DeterministicPolicy pi = random_policy(mix64(0x0ca, i), 4, 2);
            const Real j = expected_value(mdp, pi);
            const McEstimate mc = mc_policy_value(mdp, pi, 2000, 80, mix64(0x0cb, i));
            const Real slack = 3 * mc.stderr_ + mc.truncation_bias_bound;
            worst = std::min(worst, slack - std::abs(mc.mean - j));
            if (std::abs(mc.mean - j) > slack) ok = false;
        }
        report.checks.push_back({"mc_vs_exact_policy_value", ok, worst, ""});
    }
    // exact two-arm enumeration: outcome probabilities sum to one
    {
        Real worst = 0;
        for (std::uint64_t n : {1ull, 7ull, 40ull, 120ull}) {
            BanditInstance b;
            b.head_rewards = {RewardDistribution::bernoulli(0.6),
                              RewardDistribution::bernoulli(0.45)};
            b.head_mu = {0.55, 0.45};
            const auto res = exact_two_arm_subopt(b, most_played_arm_rule(), n);
            worst = std::max(worst, std::abs(res.outcome_probability_total - 1.0));
        }
        report.checks.push_back({"two_arm_probability_mass", worst <= 1e-12, 1e-12 - worst, ""});
    }
    // exact vs Monte Carlo for the most played arm at C* = 1.5, with the
    // documented exponential bound
    {
        BanditInstance b;
        b.head_rewards = {RewardDistribution::deterministic(1.0),
                          RewardDistribution::deterministic(0.0)};
        b.head_mu = {2.0 / 3.0, 1.0 / 3.0};
        const std::uint64_t n = 60;
        const auto exact = exact_two_arm_subopt(b, most_played_arm_rule(), n);
        const Real kl = bernoulli_kl(0.5, 2.0 / 3.0);
        const bool bound_ok = exact.sub_optimality <= std::exp(-static_cast<Real>(n) * kl);
        std::vector<Real> vals(100000);
        for (std::size_t r = 0; r < vals.size(); ++r) {
            const Dataset d = sample_dataset(b, n, mix64(0x0cc, r));
            vals[r] = 1.0 - b.reward_mean(most_played_arm(d, 2));
        }
        const MeanStderr m = mean_stderr(vals);
        const bool mc_ok = std::abs(m.mean - exact.sub_optimality) <= 3 * m.stderr_;
        report.checks.push_back({"two_arm_exact_vs_mc", bound_ok && mc_ok,
                                 3 * m.stderr_ - std::abs(m.mean - exact.sub_optimality),
                                 "exact=" + std::to_string(exact.sub_optimality)});
    }
    // binomial inverse moments: exact summation vs Monte Carlo and the bound
    {
        bool ok = true;
        Real worst = kInf;
        for (std::uint64_t n : {10ull, 100ull, 1000ull})
            for (Real p : {0.05, 0.2, 0.5}) {
                const Real exact = exact_inverse_moment(n, p, 0.5);
                const InverseMomentResult mc = inverse_moment_check(n, p, 0.5, 4000, 0x0cd);
                const Real se = std::sqrt(0.25 / 4000.0);  // values lie in (0,1]
                if (std::abs(mc.estimate - exact) > 3 * se) ok = false;
                if (exact > mc.bound) ok = false;
                worst = std::min(worst, mc.bound - exact);
            }
        report.checks.push_back({"inverse_moments", ok, worst, ""});
    }
    // exhaustive policy search agrees with exact optimal policies
    {
        bool ok = true;
        for (std::size_t i = 0; i < 1000; ++i) {
            const DiscountedMdp mdp = random_mdp(mix64(0x0ce, i), 3, 2, 0.9);
            const auto [pi_star, vt] = exact_optimal_policy(mdp);
            if (!(exhaustive_optimal_policy(mdp) == pi_star)) ok = false;
        }
        report.checks.push_back({"exhaustive_vs_exact_optimal", ok, 0, ""});
    }
    return report;
}

inline VerifyReport verify_instances() {
    VerifyReport report{"instances", {}};
    auto check = [&](const std::string& name, const HardInstance& inst) {
        const Certification cert = certify(inst);
        report.checks.push_back({name, cert.ok,
                                 inst.declared_c_star - cert.measured_c_star, cert.detail});
    };
    check("prop1", prop1_instance(0.1, 500));
    check("prop1_small_eps", prop1_instance(0.05, 1000));
    for (Real c : {1.2, 1.5, 2.0, 3.0, 6.0})
        for (Real g : {0.0, 0.1, 0.25}) {
            const auto pair = lecam_two_arm(c, g);
            check("lecam_a_c" + std::to_string(c), pair.first);
            check("lecam_b_c" + std::to_string(c), pair.second);
        }
    for (std::uint64_t n : {100ull, 2000ull})
        for (Real l : {0.5, 9.0}) {
            const auto pair = nonadaptivity_pair(n, l);
            check("nonadaptivity_a", pair.first);
            check("nonadaptivity_b", pair.second);
        }
    for (std::size_t s : {std::size_t(2), std::size_t(4), std::size_t(8)})
        for (Real c : {1.3, 2.0, 4.0}) {
            std::vector<std::int8_t> v(s, 1);
            v[0] = -1;
            check("cb_fano_s" + std::to_string(s), cb_fano_member(s, c, 0.25, v));
        }
    for (Real c : {1.1, 1.5, 1.9}) check("cb_most_played_failure", cb_most_played_failure(c));
    for (std::size_t s : {std::size_t(2), std::size_t(5)})
        for (std::uint64_t n : {100ull, 1000ull}) check("cb_expert", cb_expert(s, n));
    for (std::size_t s : {std::size_t(5), std::size_t(17)})
        for (Real gamma : {0.5, 0.9})
            for (Real c : {1.5, 2.0, 4.0}) {
                std::vector<std::int8_t> v((s - 1) / 4, 1);
                if (v.size() > 1) v[1] = -1;
                check("mdp_hard_s" + std::to_string(s), mdp_hard(s, gamma, c, 0.25, v));
            }
    for (std::size_t s : {std::size_t(3), std::size_t(12)})
        for (Real gamma : {0.5, 0.9})
            for (std::uint64_t n : {50ull, 1000ull})
                check("imitation_hard_mdp", imitation_hard_mdp(s, n, gamma));
    for (Real c : {1.0, 1.05, 1.4})
        check("episodic_h3",
              episodic_h3({0.5, 0.5}, {0.1, 0.05, 0.2, 0.0, 0.3, 0.1}, c));

    // the v-flip property: flipping one sign flips exactly one decision
    {
        const HardInstance a = mdp_hard(17, 0.9, 2.0, 0.25, {1, 1, -1, 1});
        const HardInstance b = mdp_hard(17, 0.9, 2.0, 0.25, {1, -1, -1, 1});
        std::size_t diffs = 0;
        for (std::size_t s = 0; s < 17; ++s)
            if (a.optimal(s) != b.optimal(s)) ++diffs;
        const bool ok = diffs == 1 && a.optimal(4 * 1 + 1) != b.optimal(4 * 1 + 1);
        report.checks.push_back({"mdp_hard_v_flip", ok, 0, ""});
    }
    // Gilbert-Varshamov code at S = 64 reaches exp(S/8) codewords
    {
        const GvCode code = gv_code(64, 1000000, 1, 3100);
        const Real target = std::exp(64.0 / 8.0);
        report.checks.push_back({"gv_code_size_s64",
                                 static_cast<Real>(code.codewords.size()) >= target &&
                                     code.pairwise_min_l1 >= 32,
                                 static_cast<Real>(code.codewords.size()) - target,
                                 "size=" + std::to_string(code.codewords.size())});
    }
    return report;
}

inline VerifyReport verify_suite(const std::string& name) {
    if (name == "env") return verify_env();
    if (name == "clean_events") return verify_clean_events();
    if (name == "contraction") return verify_contraction();
    if (name == "value_difference") return verify_value_difference();
    if (name == "oracles") return verify_oracles();
    if (name == "instances") return verify_instances();
    throw std::invalid_argument(
        "unknown suite '" + name +
        "' (valid: env, clean_events, contraction, value_difference, oracles, instances)");
}

}  // namespace pessimlab
