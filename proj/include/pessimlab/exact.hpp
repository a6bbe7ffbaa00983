#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "pessimlab/common.hpp"
#include "pessimlab/env.hpp"

namespace pessimlab {

namespace detail {

constexpr std::size_t kDirectSolveLimit = 2000;  // S*A above which we iterate instead

inline std::size_t fixed_point_cap(Real gamma) {
    // enough iterations to push the contraction residual below 1e-12 * V_max
    return static_cast<std::size_t>(
        std::ceil(std::log(1e12 / (1.0 - gamma)) / (1.0 - gamma))) + 8;
}

}  // namespace detail

// Exact policy evaluation: V solves V = r_pi + gamma P_pi V.
// Direct dense solve at desk scale, fixed-point iteration beyond it.
inline ValueTable policy_evaluation(const DiscountedMdp& mdp, const DeterministicPolicy& pi) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    if (pi.num_states() != S) throw std::invalid_argument("policy_evaluation: policy shape");
    for (std::size_t s = 0; s < S; ++s)
        if (pi(s) >= A) throw std::invalid_argument("policy_evaluation: action out of range");
    if (!(mdp.gamma < 1.0)) throw std::invalid_argument("policy_evaluation: gamma must be < 1");

    Eigen::VectorXd v(S);
    if (S * A <= detail::kDirectSolveLimit) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(S, S);
        Eigen::VectorXd r(S);
        for (std::size_t s = 0; s < S; ++s) {
            const Real* p = mdp.row(s, pi(s));
            for (std::size_t t = 0; t < S; ++t) m(s, t) -= mdp.gamma * p[t];
            r(s) = mdp.reward_mean(s, pi(s));
        }
        v = m.partialPivLu().solve(r);
    } else {
        v = Eigen::VectorXd::Zero(S);
        Eigen::VectorXd next(S);
        const Real tol = 1e-10 * mdp.v_max() * (1.0 - mdp.gamma) / 2.0;
        for (std::size_t it = 0; it < detail::fixed_point_cap(mdp.gamma); ++it) {
            Real delta = 0;
            for (std::size_t s = 0; s < S; ++s) {
                const Real* p = mdp.row(s, pi(s));
                Real acc = mdp.reward_mean(s, pi(s));
                for (std::size_t t = 0; t < S; ++t) acc += mdp.gamma * p[t] * v(t);
                next(s) = acc;
                delta = std::max(delta, std::abs(acc - v(s)));
            }
            v = next;
            if (delta < tol) break;
        }
    }

    ValueTable out;
    out.v.assign(v.data(), v.data() + S);
    out.q.resize(S * A);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            const Real* p = mdp.row(s, a);
            Real acc = mdp.reward_mean(s, a);
            for (std::size_t t = 0; t < S; ++t) acc += mdp.gamma * p[t] * out.v[t];
            out.q[s * A + a] = acc;
        }
    return out;
}

// J(pi) = rho . V^pi
inline Real expected_value(const DiscountedMdp& mdp, const DeterministicPolicy& pi) {
    const ValueTable vt = policy_evaluation(mdp, pi);
    Real j = 0;
    for (std::size_t s = 0; s < mdp.num_states; ++s) j += mdp.rho[s] * vt.v[s];
    return j;
}

inline Real expected_value(const DiscountedMdp& mdp, const ValueTable& vt) {
    Real j = 0;
    for (std::size_t s = 0; s < mdp.num_states; ++s) j += mdp.rho[s] * vt.v[s];
    return j;
}

// Normalized discounted occupancy d^pi(s,a). Solves the state flow equation
// d = (1-gamma) rho + gamma d P_pi, then spreads onto the policy's actions.
inline OccupancyTable occupancy(const DiscountedMdp& mdp, const DeterministicPolicy& pi) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    if (!(mdp.gamma < 1.0)) throw std::invalid_argument("occupancy: gamma must be < 1");

    Eigen::VectorXd d(S);
    if (S * A <= detail::kDirectSolveLimit) {
        // (I - gamma P_pi^T) d = (1-gamma) rho
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(S, S);
        Eigen::VectorXd b(S);
        for (std::size_t s = 0; s < S; ++s) {
            const Real* p = mdp.row(s, pi(s));
            for (std::size_t t = 0; t < S; ++t) m(t, s) -= mdp.gamma * p[t];
            b(s) = (1.0 - mdp.gamma) * mdp.rho[s];
        }
        d = m.partialPivLu().solve(b);
    } else {
        d = Eigen::VectorXd::Zero(S);
        Eigen::VectorXd next(S);
        for (std::size_t it = 0; it < detail::fixed_point_cap(mdp.gamma); ++it) {
            for (std::size_t t = 0; t < S; ++t) next(t) = (1.0 - mdp.gamma) * mdp.rho[t];
            for (std::size_t s = 0; s < S; ++s) {
                const Real* p = mdp.row(s, pi(s));
                for (std::size_t t = 0; t < S; ++t) next(t) += mdp.gamma * d(s) * p[t];
            }
            Real delta = (next - d).cwiseAbs().maxCoeff();
            d = next;
            if (delta < 1e-14) break;
        }
    }

    OccupancyTable occ;
    occ.d.assign(S * A, 0.0);
    for (std::size_t s = 0; s < S; ++s) occ.d[s * A + pi(s)] = d(s);
    return occ;
}

// Unnormalized k-step occupancy nu^pi_k = gamma^k rho^pi (P^pi)^k; mass gamma^k.
inline OccupancyTable k_step_occupancy(const DiscountedMdp& mdp, const DeterministicPolicy& pi,
                                       std::size_t k) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    std::vector<Real> d(mdp.rho);  // state marginal, scaled by gamma^k at the end
    std::vector<Real> next(S);
    for (std::size_t step = 0; step < k; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            if (d[s] == 0) continue;
            const Real* p = mdp.row(s, pi(s));
            for (std::size_t t = 0; t < S; ++t) next[t] += d[s] * p[t];
        }
        d.swap(next);
    }
    const Real scale = std::pow(mdp.gamma, static_cast<Real>(k));
    OccupancyTable occ;
    occ.d.assign(S * A, 0.0);
    for (std::size_t s = 0; s < S; ++s) occ.d[s * A + pi(s)] = scale * d[s];
    return occ;
}

// Optimal policy and values. Value iteration to near machine precision,
// greedy extraction with lowest-index ties, then an exact evaluation of the
// extracted policy.
inline std::pair<DeterministicPolicy, ValueTable> exact_optimal_policy(const DiscountedMdp& mdp) {
    const std::size_t S = mdp.num_states, A = mdp.num_actions;
    std::vector<Real> v(S, 0.0), next(S);
    const Real tol = 1e-13 * mdp.v_max() * (1.0 - mdp.gamma);
    const std::size_t cap = detail::fixed_point_cap(mdp.gamma);
    for (std::size_t it = 0; it < cap; ++it) {
        Real delta = 0;
        for (std::size_t s = 0; s < S; ++s) {
            Real best = -kInf;
            for (std::size_t a = 0; a < A; ++a) {
                const Real* p = mdp.row(s, a);
                Real acc = mdp.reward_mean(s, a);
                for (std::size_t t = 0; t < S; ++t) acc += mdp.gamma * p[t] * v[t];
                if (acc > best) best = acc;
            }
            next[s] = best;
            delta = std::max(delta, std::abs(best - v[s]));
        }
        v.swap(next);
        if (delta < tol) break;
    }
    DeterministicPolicy pi;
    pi.action_of.resize(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        Real best = -kInf;
        for (std::size_t a = 0; a < A; ++a) {
            const Real* p = mdp.row(s, a);
            Real acc = mdp.reward_mean(s, a);
            for (std::size_t t = 0; t < S; ++t) acc += mdp.gamma * p[t] * v[t];
            if (acc > best + 1e-12 * mdp.v_max()) {
                best = acc;
                pi.action_of[s] = static_cast<std::uint32_t>(a);
            }
        }
    }
    return {pi, policy_evaluation(mdp, pi)};
}

// ---------------------------------------------------------------------------
// Episodic counterparts.
// ---------------------------------------------------------------------------

// Backward recursion V_h = r_pi + P_pi V_{h+1}; one ValueTable per level.
inline std::vector<ValueTable> episodic_policy_evaluation(const EpisodicMdp& emdp,
                                                          const DeterministicPolicy& pi) {
    const std::size_t H = emdp.horizon, A = emdp.num_actions;
    if (pi.num_states() != emdp.num_states())
        throw std::invalid_argument("episodic_policy_evaluation: policy shape");
    std::vector<ValueTable> levels(H);
    std::vector<Real> v_next;  // V_{h+1}
    for (std::size_t h = H; h-- > 0;) {
        const std::size_t n = emdp.level_sizes[h];
        const std::size_t off = emdp.level_offset(h);
        ValueTable& vt = levels[h];
        vt.v.resize(n);
        vt.q.resize(n * A);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t a = 0; a < A; ++a) {
                Real acc = emdp.reward_mean(h, s, a);
                if (h + 1 < H) {
                    const Real* p = emdp.row(h, s, a);
                    for (std::size_t t = 0; t < emdp.level_sizes[h + 1]; ++t)
                        acc += p[t] * v_next[t];
                }
                vt.q[s * A + a] = acc;
            }
            vt.v[s] = vt.q[s * A + pi(off + s)];
        }
        v_next = vt.v;
    }
    return levels;
}

inline Real episodic_expected_value(const EpisodicMdp& emdp, const DeterministicPolicy& pi) {
    const auto levels = episodic_policy_evaluation(emdp, pi);
    Real j = 0;
    for (std::size_t s = 0; s < emdp.level_sizes[0]; ++s) j += emdp.rho[s] * levels[0].v[s];
    return j;
}

// Optimal episodic policy via backward induction, lowest-index ties.
inline std::pair<DeterministicPolicy, std::vector<ValueTable>> episodic_optimal_policy(
    const EpisodicMdp& emdp) {
    const std::size_t H = emdp.horizon, A = emdp.num_actions;
    DeterministicPolicy pi;
    pi.action_of.resize(emdp.num_states(), 0);
    std::vector<ValueTable> levels(H);
    std::vector<Real> v_next;
    for (std::size_t h = H; h-- > 0;) {
        const std::size_t n = emdp.level_sizes[h];
        const std::size_t off = emdp.level_offset(h);
        ValueTable& vt = levels[h];
        vt.v.resize(n);
        vt.q.resize(n * A);
        for (std::size_t s = 0; s < n; ++s) {
            Real best = -kInf;
            std::uint32_t best_a = 0;
            for (std::size_t a = 0; a < A; ++a) {
                Real acc = emdp.reward_mean(h, s, a);
                if (h + 1 < H) {
                    const Real* p = emdp.row(h, s, a);
                    for (std::size_t t = 0; t < emdp.level_sizes[h + 1]; ++t)
                        acc += p[t] * v_next[t];
                }
                vt.q[s * A + a] = acc;
                if (acc > best) { best = acc; best_a = static_cast<std::uint32_t>(a); }
            }
            vt.v[s] = best;
            pi.action_of[off + s] = best_a;
        }
        v_next = vt.v;
    }
    return {pi, levels};
}

// Episodic occupancy d^pi(s,a) = (1/H) sum_h P_h(s_h=s, a_h=a); mass 1.
// Indexed over global states.
inline OccupancyTable episodic_occupancy(const EpisodicMdp& emdp,
                                         const DeterministicPolicy& pi) {
    const std::size_t H = emdp.horizon, A = emdp.num_actions;
    OccupancyTable occ;
    occ.d.assign(emdp.num_states() * A, 0.0);
    std::vector<Real> level_prob(emdp.rho);
    for (std::size_t h = 0; h < H; ++h) {
        const std::size_t off = emdp.level_offset(h);
        for (std::size_t s = 0; s < emdp.level_sizes[h]; ++s)
            occ.d[(off + s) * A + pi(off + s)] += level_prob[s] / static_cast<Real>(H);
        if (h + 1 < H) {
            std::vector<Real> next(emdp.level_sizes[h + 1], 0.0);
            for (std::size_t s = 0; s < emdp.level_sizes[h]; ++s) {
                if (level_prob[s] == 0) continue;
                const Real* p = emdp.row(h, s, pi(off + s));
                for (std::size_t t = 0; t < emdp.level_sizes[h + 1]; ++t)
                    next[t] += level_prob[s] * p[t];
            }
            level_prob.swap(next);
        }
    }
    return occ;
}

}  // namespace pessimlab
