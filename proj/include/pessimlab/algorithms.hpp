#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "pessimlab/common.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/env.hpp"

namespace pessimlab {

// Confidence parameters shared by all LCB algorithms. When `override_L` is
// set it replaces the algorithm's derived penalty scale L wholesale; the
// per-algorithm b(.) formulas below document the convention.
struct PenaltyParams {
    Real delta = 0;  // <= 0 selects the default delta = 1/N
    std::optional<Real> override_L;

    Real resolved_delta(std::uint64_t n) const {
        if (delta > 0 && delta < 1) return delta;
        if (delta != 0) throw std::invalid_argument("PenaltyParams: delta must lie in (0,1)");
        return 1.0 / static_cast<Real>(std::max<std::uint64_t>(n, 2));
    }
};

// Penalty scales. Conventions:
//   MAB:      b(a)   = sqrt(L / (2 N(a))),        L = log(2|A|/delta)
//   CB:       b(s,a) = sqrt(L / N(s,a)),          L = 2000 log(2 S|A|/delta)
//   VI:       b(s,a) = V_max sqrt(L / (m(s,a)v1)),L = 2000 log(2 (T+1) S|A|/delta)
//   episodic: b(s,a) = H sqrt(L / N(s,a)),        L = 2000 log(2 S|A|/delta)
inline Real mab_penalty_scale(Real num_actions, Real delta) {
    return std::log(2.0 * num_actions / delta);
}
inline Real cb_penalty_scale(Real s, Real a, Real delta) {
    return 2000.0 * std::log(2.0 * s * a / delta);
}
inline Real vi_penalty_scale(Real t_plus_1, Real s, Real a, Real delta) {
    return 2000.0 * std::log(2.0 * t_plus_1 * s * a / delta);
}
inline Real episodic_penalty_scale(Real s, Real a, Real delta) {
    return 2000.0 * std::log(2.0 * s * a / delta);
}

namespace detail {

// Arm scoring shared by the bandit rules. Scores every observed arm with
// `score(count, mean)` and every unseen arm with `unseen_score`; returns the
// argmax with ties broken toward the lowest arm index. Never materializes
// the action space.
template <typename ScoreFn>
std::uint64_t best_arm(const Dataset& data, std::uint64_t num_actions, ScoreFn score,
                       Real unseen_score) {
    const auto stats = arm_stats(data);
    bool have_best = false;
    std::uint64_t best_arm_idx = 0;
    Real best_score = 0;
    for (const auto& [arm, st] : stats) {
        const Real sc = score(st.count, st.reward_sum / static_cast<Real>(st.count));
        if (!have_best || sc > best_score || (sc == best_score && arm < best_arm_idx)) {
            have_best = true;
            best_score = sc;
            best_arm_idx = arm;
        }
    }
    if (stats.size() < num_actions) {
        // lowest-index unseen arm
        std::uint64_t unseen = 0;
        while (stats.count(unseen)) ++unseen;
        if (!have_best || unseen_score > best_score ||
            (unseen_score == best_score && unseen < best_arm_idx)) {
            best_arm_idx = unseen;
        }
    }
    return best_arm_idx;
}

}  // namespace detail

// LCB for multi-armed bandits: argmax_a rhat(a) - b(a) with rhat = 0 and
// b = 1 for unseen arms.
inline std::uint64_t lcb_mab(const Dataset& data, std::uint64_t num_actions,
                             const PenaltyParams& params = {}) {
    const Real delta = params.resolved_delta(data.size());
    const Real l = params.override_L ? *params.override_L
                                     : mab_penalty_scale(static_cast<Real>(num_actions), delta);
    return detail::best_arm(
        data, num_actions,
        [l](std::uint64_t count, Real mean) {
            return mean - std::sqrt(l / (2.0 * static_cast<Real>(count)));
        },
        -1.0);
}

// Empirical best arm: argmax of empirical means; unseen arms score 0.
inline std::uint64_t empirical_best_arm(const Dataset& data, std::uint64_t num_actions) {
    return detail::best_arm(
        data, num_actions, [](std::uint64_t, Real mean) { return mean; }, 0.0);
}

// Most played arm: argmax_a N(a); unseen arms have count 0.
inline std::uint64_t most_played_arm(const Dataset& data, std::uint64_t num_actions) {
    return detail::best_arm(
        data, num_actions,
        [](std::uint64_t count, Real) { return static_cast<Real>(count); }, 0.0);
}

// LCB for contextual bandits: per state, argmax_a rhat(s,a) - b(s,a).
inline DeterministicPolicy lcb_cb(const Dataset& data, std::size_t S, std::size_t A,
                                  const PenaltyParams& params = {}) {
    const Real delta = params.resolved_delta(data.size());
    const Real l = params.override_L
                       ? *params.override_L
                       : cb_penalty_scale(static_cast<Real>(S), static_cast<Real>(A), delta);
    std::vector<std::uint64_t> n(S * A, 0);
    std::vector<Real> rsum(S * A, 0.0);
    for (const Transition& t : data.transitions) {
        if (t.s >= S || t.a >= A) throw MalformedDatasetError("lcb_cb: record out of range");
        ++n[t.s * A + t.a];
        rsum[t.s * A + t.a] += t.r;
    }
    DeterministicPolicy pi;
    pi.action_of.resize(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        Real best = -kInf;
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t cell = s * A + a;
            const Real score =
                n[cell] == 0 ? -1.0
                             : rsum[cell] / static_cast<Real>(n[cell]) -
                                   std::sqrt(l / static_cast<Real>(n[cell]));
            if (score > best) { best = score; pi.action_of[s] = static_cast<std::uint32_t>(a); }
        }
    }
    return pi;
}

// Behavior cloning: the most played action per observed state, action 0
// elsewhere.
inline DeterministicPolicy behavior_cloning(const Dataset& data, std::size_t S, std::size_t A) {
    const CountsTable c = counts(data, S, A);
    DeterministicPolicy pi;
    pi.action_of.resize(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        std::uint64_t best = 0;
        for (std::size_t a = 0; a < A; ++a) {
            if (c.at(s, a) > best) { best = c.at(s, a); pi.action_of[s] = static_cast<std::uint32_t>(a); }
        }
    }
    return pi;
}

// ---------------------------------------------------------------------------
// Offline value iteration with LCB.
// ---------------------------------------------------------------------------

// Per-iteration internals of one VI-LCB run, for invariant checks.
// Index t runs over iterations 1..T; V and pi additionally carry index 0.
struct ViTrace {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::size_t t_iterations = 0;  // T
    std::size_t fold_size = 0;     // m
    Real gamma = 0;
    Real penalty_scale = 0;  // L
    std::vector<std::vector<std::uint64_t>> fold_counts;   // T+1 tables (folds 0..T)
    std::vector<std::vector<Real>> r_t;                    // T tables
    std::vector<std::vector<Real>> p_t;                    // T tables, (S*A) x S
    std::vector<std::vector<Real>> b_t;                    // T tables
    std::vector<std::vector<Real>> q_t;                    // T tables
    std::vector<std::vector<Real>> v_t;                    // T+1 tables (V_0..V_T)
    std::vector<DeterministicPolicy> pi_t;                 // T+1 policies
};

struct MdpShape {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    Real gamma = 0;
};

inline std::size_t vi_lcb_iterations(std::uint64_t n, Real gamma) {
    return static_cast<std::size_t>(
        std::ceil(std::log(static_cast<Real>(n)) / (1.0 - gamma)));
}

namespace detail {

inline DeterministicPolicy vi_core(const Dataset& data, const MdpShape& shape,
                                   const PenaltyParams& params, bool monotone,
                                   ViTrace* trace) {
    const std::size_t S = shape.num_states, A = shape.num_actions;
    const std::uint64_t n = data.size();
    if (n == 0) throw InsufficientDataError("vi_lcb: empty dataset");
    if (!(shape.gamma >= 0.0 && shape.gamma < 1.0))
        throw std::invalid_argument("vi_lcb: gamma must lie in [0,1)");
    const std::size_t T = vi_lcb_iterations(n, shape.gamma);
    if (n < T + 1)
        throw InsufficientDataError("vi_lcb: need at least T+1 records");
    const Real delta = params.resolved_delta(n);
    const Real l = params.override_L
                       ? *params.override_L
                       : vi_penalty_scale(static_cast<Real>(T + 1), static_cast<Real>(S),
                                          static_cast<Real>(A), delta);
    const Real v_max = 1.0 / (1.0 - shape.gamma);
    const std::uint64_t fold_seed = mix64(data.provenance.seed, 0x76696c63ull);  // "vilc"
    const std::vector<Dataset> folds = split_folds(data, T, fold_seed);
    const std::size_t m = folds[0].size();

    // pi_0: most played action in fold 0
    const CountsTable m0 = counts(folds[0], S, A);
    DeterministicPolicy pi;
    pi.action_of.resize(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        std::uint64_t best = 0;
        for (std::size_t a = 0; a < A; ++a)
            if (m0.at(s, a) > best) { best = m0.at(s, a); pi.action_of[s] = static_cast<std::uint32_t>(a); }
    }
    std::vector<Real> v(S, 0.0);

    if (trace) {
        *trace = ViTrace{};
        trace->num_states = S;
        trace->num_actions = A;
        trace->t_iterations = T;
        trace->fold_size = m;
        trace->gamma = shape.gamma;
        trace->penalty_scale = l;
        trace->fold_counts.push_back(m0.n);
        trace->v_t.push_back(v);
        trace->pi_t.push_back(pi);
    }

    std::vector<std::uint64_t> cnt(S * A);
    std::vector<Real> rsum(S * A), vsum(S * A), q(S * A), b(S * A);
    for (std::size_t t = 1; t <= T; ++t) {
        std::fill(cnt.begin(), cnt.end(), 0);
        std::fill(rsum.begin(), rsum.end(), 0.0);
        std::fill(vsum.begin(), vsum.end(), 0.0);
        for (const Transition& tr : folds[t].transitions) {
            if (tr.s >= S || tr.a >= A || tr.s_next < 0 ||
                static_cast<std::size_t>(tr.s_next) >= S)
                throw MalformedDatasetError("vi_lcb: record out of range");
            const std::size_t cell = tr.s * A + tr.a;
            ++cnt[cell];
            rsum[cell] += tr.r;
            vsum[cell] += v[static_cast<std::size_t>(tr.s_next)];
        }
        Real v_mean = 0;  // uniform transition row stands in for unseen cells
        for (std::size_t s = 0; s < S; ++s) v_mean += v[s];
        v_mean /= static_cast<Real>(S);
        for (std::size_t cell = 0; cell < S * A; ++cell) {
            const std::uint64_t k = cnt[cell];
            b[cell] = v_max * std::sqrt(l / static_cast<Real>(std::max<std::uint64_t>(k, 1)));
            const Real r_hat = k == 0 ? 0.0 : rsum[cell] / static_cast<Real>(k);
            const Real pv = k == 0 ? v_mean : vsum[cell] / static_cast<Real>(k);
            q[cell] = r_hat - b[cell] + shape.gamma * pv;
        }
        if (trace) {
            trace->fold_counts.push_back(cnt);
            std::vector<Real> r_hat(S * A), p_rows(S * A * S, 0.0);
            std::vector<std::uint64_t> next_cnt(S * A * S, 0);
            for (const Transition& tr : folds[t].transitions)
                ++next_cnt[(tr.s * A + tr.a) * S + static_cast<std::size_t>(tr.s_next)];
            for (std::size_t cell = 0; cell < S * A; ++cell) {
                r_hat[cell] = cnt[cell] == 0 ? 0.0 : rsum[cell] / static_cast<Real>(cnt[cell]);
                for (std::size_t s2 = 0; s2 < S; ++s2)
                    p_rows[cell * S + s2] =
                        cnt[cell] == 0
                            ? 1.0 / static_cast<Real>(S)
                            : static_cast<Real>(next_cnt[cell * S + s2]) /
                                  static_cast<Real>(cnt[cell]);
            }
            trace->r_t.push_back(std::move(r_hat));
            trace->p_t.push_back(std::move(p_rows));
            trace->b_t.push_back(b);
            trace->q_t.push_back(q);
        }
        for (std::size_t s = 0; s < S; ++s) {
            Real v_mid = -kInf;
            std::uint32_t a_mid = 0;
            for (std::size_t a = 0; a < A; ++a)
                if (q[s * A + a] > v_mid) { v_mid = q[s * A + a]; a_mid = static_cast<std::uint32_t>(a); }
            if (!monotone || v_mid > v[s]) {
                v[s] = v_mid;
                pi.action_of[s] = a_mid;
            }
        }
        if (trace) {
            trace->v_t.push_back(v);
            trace->pi_t.push_back(pi);
        }
    }
    return pi;
}

}  // namespace detail

inline DeterministicPolicy vi_lcb(const Dataset& data, const MdpShape& shape,
                                  const PenaltyParams& params = {}, ViTrace* trace = nullptr) {
    return detail::vi_core(data, shape, params, /*monotone=*/true, trace);
}

// Non-pessimistic baseline: the VI-LCB pipeline with all penalties forced
// to zero and the monotone update disabled.
inline DeterministicPolicy empirical_vi(const Dataset& data, const MdpShape& shape,
                                        ViTrace* trace = nullptr) {
    PenaltyParams p;
    p.override_L = 0.0;
    return detail::vi_core(data, shape, p, /*monotone=*/false, trace);
}

// ---------------------------------------------------------------------------
// Episodic value iteration with LCB: single backward pass over levels.
//
// `deterministic_rewards` selects the deterministic-reward variant that
// skips the penalty on observed cells of the last level, where the
// empirical reward is already exact.
// ---------------------------------------------------------------------------
struct EpisodicShape {
    std::vector<std::size_t> level_sizes;
    std::size_t num_actions = 0;
};

inline DeterministicPolicy episodic_vi_lcb(const Dataset& data, const EpisodicShape& shape,
                                           const PenaltyParams& params = {},
                                           bool deterministic_rewards = false,
                                           std::vector<std::vector<Real>>* v_hat_out = nullptr) {
    const std::size_t H = shape.level_sizes.size(), A = shape.num_actions;
    std::size_t total_states = 0;
    std::vector<std::size_t> offsets(H);
    for (std::size_t h = 0; h < H; ++h) {
        offsets[h] = total_states;
        total_states += shape.level_sizes[h];
    }
    const Real delta = params.resolved_delta(data.size());
    const Real l = params.override_L
                       ? *params.override_L
                       : episodic_penalty_scale(static_cast<Real>(total_states),
                                                static_cast<Real>(A), delta);
    const Real h_real = static_cast<Real>(H);

    std::vector<std::uint64_t> cnt(total_states * A, 0);
    std::vector<Real> rsum(total_states * A, 0.0);
    // dense next-state tallies per level
    std::vector<std::vector<std::uint64_t>> next_cnt(H);
    for (std::size_t h = 0; h + 1 < H; ++h)
        next_cnt[h].assign(shape.level_sizes[h] * A * shape.level_sizes[h + 1], 0);
    for (const Transition& t : data.transitions) {
        if (t.s >= total_states || t.a >= A)
            throw MalformedDatasetError("episodic_vi_lcb: record out of range");
        const std::size_t cell = t.s * A + t.a;
        ++cnt[cell];
        rsum[cell] += t.r;
        std::size_t h = 0;
        std::size_t local = t.s;
        while (local >= shape.level_sizes[h]) { local -= shape.level_sizes[h]; ++h; }
        if (h + 1 < H) {
            if (t.s_next < 0) throw MalformedDatasetError("episodic_vi_lcb: missing next state");
            const std::size_t local_next = static_cast<std::size_t>(t.s_next) - offsets[h + 1];
            if (local_next >= shape.level_sizes[h + 1])
                throw MalformedDatasetError("episodic_vi_lcb: next state off level");
            ++next_cnt[h][(local * A + t.a) * shape.level_sizes[h + 1] + local_next];
        }
    }

    DeterministicPolicy pi;
    pi.action_of.resize(total_states, 0);
    if (v_hat_out) v_hat_out->assign(H, {});
    std::vector<Real> v_next;  // V at level h+1
    for (std::size_t h = H; h-- > 0;) {
        const std::size_t n_here = shape.level_sizes[h];
        std::vector<Real> v_here(n_here);
        for (std::size_t s = 0; s < n_here; ++s) {
            Real best = -kInf;
            std::uint32_t best_a = 0;
            for (std::size_t a = 0; a < A; ++a) {
                const std::size_t cell = (offsets[h] + s) * A + a;
                const std::uint64_t k = cnt[cell];
                Real b, r_hat, pv = 0;
                if (k == 0) {
                    b = h_real * std::sqrt(l);
                    r_hat = 0;
                    if (h + 1 < H) {
                        for (Real vn : v_next) pv += vn;
                        pv /= static_cast<Real>(v_next.size());
                    }
                } else {
                    b = h_real * std::sqrt(l / static_cast<Real>(k));
                    if (deterministic_rewards && h + 1 == H) b = 0;
                    r_hat = rsum[cell] / static_cast<Real>(k);
                    if (h + 1 < H) {
                        const std::uint64_t* row =
                            next_cnt[h].data() + (s * A + a) * shape.level_sizes[h + 1];
                        for (std::size_t t2 = 0; t2 < shape.level_sizes[h + 1]; ++t2)
                            pv += static_cast<Real>(row[t2]) * v_next[t2];
                        pv /= static_cast<Real>(k);
                    }
                }
                const Real q = r_hat - b + pv;
                if (q > best) { best = q; best_a = static_cast<std::uint32_t>(a); }
            }
            v_here[s] = best;
            pi.action_of[offsets[h] + s] = best_a;
        }
        if (v_hat_out) (*v_hat_out)[h] = v_here;
        v_next.swap(v_here);
    }
    return pi;
}

}  // namespace pessimlab
