#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pessimlab/common.hpp"
#include "pessimlab/env.hpp"

namespace pessimlab {

// One offline record. `s_next` is -1 when absent (bandit / contextual
// bandit / terminal level).
struct Transition {
    std::uint32_t s = 0;
    std::uint64_t a = 0;
    Real r = 0;
    std::int64_t s_next = -1;
};

struct Provenance {
    std::string instance_id;
    std::uint64_t seed = 0;
    std::uint64_t n = 0;
};

struct Dataset {
    std::vector<Transition> transitions;
    Provenance provenance;

    std::size_t size() const { return transitions.size(); }
};

// Dense N(s,a) tally.
struct CountsTable {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<std::uint64_t> n;  // S*A

    std::uint64_t at(std::size_t s, std::size_t a) const { return n[s * num_actions + a]; }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto x : n) t += x;
        return t;
    }
};

inline CountsTable counts(const Dataset& data, std::size_t S, std::size_t A) {
    CountsTable c;
    c.num_states = S;
    c.num_actions = A;
    c.n.assign(S * A, 0);
    for (const Transition& t : data.transitions) {
        if (t.s >= S || t.a >= A)
            throw MalformedDatasetError("counts: record index out of range");
        ++c.n[t.s * A + t.a];
    }
    return c;
}

// Per-arm count and reward sum, keyed sparsely; used by the bandit
// algorithms so that instances with astronomically many arms stay cheap.
struct ArmStats {
    std::uint64_t count = 0;
    Real reward_sum = 0;
};

inline std::unordered_map<std::uint64_t, ArmStats> arm_stats(const Dataset& data) {
    std::unordered_map<std::uint64_t, ArmStats> stats;
    stats.reserve(data.size());
    for (const Transition& t : data.transitions) {
        ArmStats& s = stats[t.a];
        ++s.count;
        s.reward_sum += t.r;
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Sampling. Records are i.i.d.: (s,a) ~ mu, r ~ R(s,a), s' ~ P(.|s,a).
// Each record consumes a fixed number of counter positions, so datasets are
// reproducible bit-exactly from (instance, N, seed).
// ---------------------------------------------------------------------------

inline Dataset sample_dataset(const BanditInstance& bandit, std::uint64_t n, std::uint64_t seed,
                              const std::string& instance_id = "bandit") {
    if (n == 0) throw std::invalid_argument("sample_dataset: N must be >= 1");
    const std::vector<Real> head_cdf = cumulative(bandit.head_mu);
    const Real head_mass = head_cdf.empty() ? 0.0 : head_cdf.back();
    Dataset d;
    d.provenance = {instance_id, seed, n};
    d.transitions.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Real u_arm = uniform_at(seed, 2 * i);
        std::uint64_t a;
        if (u_arm < head_mass || bandit.tail_count == 0) {
            a = sample_cdf(head_cdf, std::min(u_arm, head_mass));
        } else {
            const std::uint64_t k = static_cast<std::uint64_t>(
                (u_arm - head_mass) / bandit.tail_mu_each);
            a = bandit.head_mu.size() + std::min(k, bandit.tail_count - 1);
        }
        Transition& t = d.transitions[i];
        t.s = 0;
        t.a = a;
        t.r = bandit.reward(a).sample(uniform_at(seed, 2 * i + 1));
        t.s_next = -1;
    }
    return d;
}

inline Dataset sample_dataset(const CbInstance& cb, std::uint64_t n, std::uint64_t seed,
                              const std::string& instance_id = "cb") {
    if (n == 0) throw std::invalid_argument("sample_dataset: N must be >= 1");
    const std::vector<Real> mu_cdf = cumulative(cb.mu);
    Dataset d;
    d.provenance = {instance_id, seed, n};
    d.transitions.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t cell = sample_cdf(mu_cdf, uniform_at(seed, 2 * i));
        Transition& t = d.transitions[i];
        t.s = static_cast<std::uint32_t>(cell / cb.num_actions);
        t.a = cell % cb.num_actions;
        t.r = cb.rewards[cell].sample(uniform_at(seed, 2 * i + 1));
        t.s_next = -1;
    }
    return d;
}

inline Dataset sample_dataset(const DiscountedMdp& mdp, const std::vector<Real>& mu,
                              std::uint64_t n, std::uint64_t seed,
                              const std::string& instance_id = "mdp") {
    if (n == 0) throw std::invalid_argument("sample_dataset: N must be >= 1");
    if (mu.size() != mdp.num_states * mdp.num_actions)
        throw std::invalid_argument("sample_dataset: behavior table shape");
    const std::vector<Real> mu_cdf = cumulative(mu);
    std::vector<std::vector<Real>> row_cdf(mu.size());
    for (std::size_t s = 0; s < mdp.num_states; ++s)
        for (std::size_t a = 0; a < mdp.num_actions; ++a) {
            const Real* p = mdp.row(s, a);
            row_cdf[s * mdp.num_actions + a] = cumulative({p, p + mdp.num_states});
        }
    Dataset d;
    d.provenance = {instance_id, seed, n};
    d.transitions.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t cell = sample_cdf(mu_cdf, uniform_at(seed, 3 * i));
        Transition& t = d.transitions[i];
        t.s = static_cast<std::uint32_t>(cell / mdp.num_actions);
        t.a = cell % mdp.num_actions;
        t.r = mdp.rewards[cell].sample(uniform_at(seed, 3 * i + 1));
        t.s_next = static_cast<std::int64_t>(
            sample_cdf(row_cdf[cell], uniform_at(seed, 3 * i + 2)));
    }
    return d;
}

// Episodic sampling uses global state indices; records at the last level
// carry no next state.
inline Dataset sample_dataset(const EpisodicMdp& emdp, const std::vector<Real>& mu,
                              std::uint64_t n, std::uint64_t seed,
                              const std::string& instance_id = "emdp") {
    if (n == 0) throw std::invalid_argument("sample_dataset: N must be >= 1");
    const std::size_t A = emdp.num_actions;
    if (mu.size() != emdp.num_states() * A)
        throw std::invalid_argument("sample_dataset: behavior table shape");
    const std::vector<Real> mu_cdf = cumulative(mu);
    Dataset d;
    d.provenance = {instance_id, seed, n};
    d.transitions.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t cell = sample_cdf(mu_cdf, uniform_at(seed, 3 * i));
        const std::size_t s = cell / A, a = cell % A;
        const auto [h, local] = emdp.locate(s);
        Transition& t = d.transitions[i];
        t.s = static_cast<std::uint32_t>(s);
        t.a = a;
        t.r = emdp.rewards[h][local * A + a].sample(uniform_at(seed, 3 * i + 1));
        if (h + 1 < emdp.horizon) {
            const Real* p = emdp.row(h, local, a);
            const std::vector<Real> cdf = cumulative({p, p + emdp.level_sizes[h + 1]});
            t.s_next = static_cast<std::int64_t>(
                emdp.level_offset(h + 1) + sample_cdf(cdf, uniform_at(seed, 3 * i + 2)));
        } else {
            t.s_next = -1;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Fold splitting for VI-LCB: a uniformly random permutation followed by T+1
// contiguous chunks of m = floor(N/(T+1)); leftovers are discarded.
// ---------------------------------------------------------------------------
inline std::vector<Dataset> split_folds(const Dataset& data, std::size_t t_folds,
                                        std::uint64_t seed) {
    const std::size_t n = data.size();
    const std::size_t parts = t_folds + 1;
    if (n < parts)
        throw InsufficientDataError("split_folds: need at least T+1 records");
    const std::size_t m = n / parts;
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    Rng rng(mix64(seed, 0x666f6c64ull));  // "fold"
    for (std::size_t i = n; i-- > 1;)
        std::swap(perm[i], perm[rng.next_below(i + 1)]);
    std::vector<Dataset> folds(parts);
    for (std::size_t f = 0; f < parts; ++f) {
        folds[f].provenance = data.provenance;
        folds[f].provenance.n = m;
        folds[f].transitions.reserve(m);
        for (std::size_t i = 0; i < m; ++i)
            folds[f].transitions.push_back(data.transitions[perm[f * m + i]]);
    }
    return folds;
}

// ---------------------------------------------------------------------------
// Single-policy concentrability: max over cells of d(s,a)/mu(s,a), with
// 0/0 = 0 and positive/0 = +inf.
// ---------------------------------------------------------------------------
inline Real concentrability(const OccupancyTable& d, const std::vector<Real>& mu) {
    if (d.d.size() != mu.size())
        throw std::invalid_argument("concentrability: mismatched shapes");
    Real worst = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (d.d[i] <= 0) continue;
        if (mu[i] <= 0) return kInf;
        worst = std::max(worst, d.d[i] / mu[i]);
    }
    return worst;
}

}  // namespace pessimlab
