#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pessimlab/common.hpp"
#include "pessimlab/reward.hpp"

namespace pessimlab {

constexpr Real kProbTol = 1e-12;

inline void check_probability_vector(const std::vector<Real>& p, std::size_t offset,
                                     std::size_t len, const char* what) {
    Real total = 0;
    for (std::size_t i = 0; i < len; ++i) {
        if (p[offset + i] < 0) throw std::invalid_argument(std::string(what) + ": negative entry");
        total += p[offset + i];
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw std::invalid_argument(std::string(what) + ": entries must sum to 1");
}

// A state -> action map. Actions are 0-based indices.
struct DeterministicPolicy {
    std::vector<std::uint32_t> action_of;

    std::uint32_t operator()(std::size_t s) const { return action_of[s]; }
    std::size_t num_states() const { return action_of.size(); }

    bool operator==(const DeterministicPolicy& o) const { return action_of == o.action_of; }
};

// V(s) and Q(s,a) tables, row-major in a.
struct ValueTable {
    std::vector<Real> v;  // size S
    std::vector<Real> q;  // size S*A

    Real q_at(std::size_t s, std::size_t a, std::size_t num_actions) const {
        return q[s * num_actions + a];
    }
};

// Normalized state-action occupancy d(s,a), row-major in a.
struct OccupancyTable {
    std::vector<Real> d;  // size S*A

    Real total_mass() const {
        Real m = 0;
        for (Real x : d) m += x;
        return m;
    }
};

// ---------------------------------------------------------------------------
// Infinite-horizon discounted MDP (S, A, P, R, rho, gamma).
// ---------------------------------------------------------------------------
struct DiscountedMdp {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<Real> transition;             // (S*A) x S, row-major
    std::vector<RewardDistribution> rewards;  // S*A
    std::vector<Real> rho;                    // S
    Real gamma = 0;

    Real v_max() const { return 1.0 / (1.0 - gamma); }

    const Real* row(std::size_t s, std::size_t a) const {
        return transition.data() + (s * num_actions + a) * num_states;
    }
    Real* row(std::size_t s, std::size_t a) {
        return transition.data() + (s * num_actions + a) * num_states;
    }

    Real reward_mean(std::size_t s, std::size_t a) const {
        return rewards[s * num_actions + a].mean();
    }

    void validate() const {
        if (num_states == 0 || num_actions == 0)
            throw std::invalid_argument("mdp: empty state or action space");
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw std::invalid_argument("mdp: discount must lie in [0,1)");
        if (transition.size() != num_states * num_actions * num_states)
            throw std::invalid_argument("mdp: transition table has wrong shape");
        if (rewards.size() != num_states * num_actions)
            throw std::invalid_argument("mdp: reward table has wrong shape");
        if (rho.size() != num_states) throw std::invalid_argument("mdp: rho has wrong shape");
        for (std::size_t s = 0; s < num_states; ++s)
            for (std::size_t a = 0; a < num_actions; ++a)
                check_probability_vector(transition, (s * num_actions + a) * num_states,
                                         num_states, "mdp transition row");
        check_probability_vector(rho, 0, num_states, "mdp rho");
    }
};

// ---------------------------------------------------------------------------
// Episodic MDP with disjoint per-level state sets.
//
// States carry global indices; level h occupies [offset(h), offset(h)+size(h)).
// transition[h] is (size(h)*A) x size(h+1), row-major; level H-1 has no
// transition table.
// ---------------------------------------------------------------------------
struct EpisodicMdp {
    std::size_t horizon = 0;
    std::size_t num_actions = 0;
    std::vector<std::size_t> level_sizes;               // H entries
    std::vector<std::vector<Real>> transition;          // H-1 tables
    std::vector<std::vector<RewardDistribution>> rewards;  // H tables, size(h)*A each
    std::vector<Real> rho;                              // over level 0

    std::size_t num_states() const {
        std::size_t n = 0;
        for (std::size_t s : level_sizes) n += s;
        return n;
    }

    std::size_t level_offset(std::size_t h) const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < h; ++i) n += level_sizes[i];
        return n;
    }

    // (level, local index) of a global state index.
    std::pair<std::size_t, std::size_t> locate(std::size_t global) const {
        std::size_t h = 0;
        while (global >= level_sizes[h]) { global -= level_sizes[h]; ++h; }
        return {h, global};
    }

    const Real* row(std::size_t h, std::size_t local_s, std::size_t a) const {
        return transition[h].data() + (local_s * num_actions + a) * level_sizes[h + 1];
    }

    Real reward_mean(std::size_t h, std::size_t local_s, std::size_t a) const {
        return rewards[h][local_s * num_actions + a].mean();
    }

    void validate() const {
        if (horizon == 0 || num_actions == 0)
            throw std::invalid_argument("episodic mdp: empty horizon or action space");
        if (level_sizes.size() != horizon || rewards.size() != horizon ||
            transition.size() + 1 != horizon)
            throw std::invalid_argument("episodic mdp: mismatched level tables");
        for (std::size_t h = 0; h + 1 < horizon; ++h) {
            if (transition[h].size() != level_sizes[h] * num_actions * level_sizes[h + 1])
                throw std::invalid_argument("episodic mdp: transition table has wrong shape");
            for (std::size_t s = 0; s < level_sizes[h]; ++s)
                for (std::size_t a = 0; a < num_actions; ++a)
                    check_probability_vector(transition[h],
                                             (s * num_actions + a) * level_sizes[h + 1],
                                             level_sizes[h + 1], "episodic transition row");
        }
        for (std::size_t h = 0; h < horizon; ++h)
            if (rewards[h].size() != level_sizes[h] * num_actions)
                throw std::invalid_argument("episodic mdp: reward table has wrong shape");
        if (rho.size() != level_sizes[0])
            throw std::invalid_argument("episodic mdp: rho has wrong shape");
        check_probability_vector(rho, 0, rho.size(), "episodic rho");
    }
};

// ---------------------------------------------------------------------------
// Multi-armed bandit with behavior distribution.
//
// Arms [0, head) are stored explicitly. An optional tail of `tail_count`
// arms shares one reward descriptor and one per-arm behavior probability;
// this keeps constructions with astronomically many identical arms (e.g.
// |A| = N^3) representable without materializing them.
// ---------------------------------------------------------------------------
struct BanditInstance {
    std::vector<RewardDistribution> head_rewards;
    std::vector<Real> head_mu;
    std::uint64_t tail_count = 0;
    Real tail_mu_each = 0;
    RewardDistribution tail_reward;

    std::uint64_t num_actions() const { return head_rewards.size() + tail_count; }

    Real mu(std::uint64_t a) const {
        return a < head_mu.size() ? head_mu[a] : tail_mu_each;
    }

    const RewardDistribution& reward(std::uint64_t a) const {
        return a < head_rewards.size() ? head_rewards[a] : tail_reward;
    }

    Real reward_mean(std::uint64_t a) const { return reward(a).mean(); }

    // Optimal arm: argmax of exact means, ties to the lowest index.
    std::uint64_t optimal_arm() const {
        std::uint64_t best = 0;
        Real best_mean = head_rewards.empty() ? tail_reward.mean() : head_rewards[0].mean();
        for (std::uint64_t a = 1; a < head_rewards.size(); ++a) {
            const Real m = head_rewards[a].mean();
            if (m > best_mean) { best_mean = m; best = a; }
        }
        if (tail_count > 0 && tail_reward.mean() > best_mean) best = head_rewards.size();
        return best;
    }

    void validate() const {
        if (num_actions() == 0) throw std::invalid_argument("bandit: no arms");
        if (head_rewards.size() != head_mu.size())
            throw std::invalid_argument("bandit: mismatched head tables");
        Real total = 0;
        for (Real m : head_mu) {
            if (m < 0) throw std::invalid_argument("bandit: negative behavior probability");
            total += m;
        }
        if (tail_mu_each < 0) throw std::invalid_argument("bandit: negative tail probability");
        total += tail_mu_each * static_cast<Real>(tail_count);
        if (std::abs(total - 1.0) > kProbTol)
            throw std::invalid_argument("bandit: behavior distribution must sum to 1");
    }
};

// ---------------------------------------------------------------------------
// Contextual bandit: initial state distribution rho, rewards and behavior
// distribution over S x A.
// ---------------------------------------------------------------------------
struct CbInstance {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<Real> rho;                    // S
    std::vector<RewardDistribution> rewards;  // S*A
    std::vector<Real> mu;                     // S*A

    Real reward_mean(std::size_t s, std::size_t a) const {
        return rewards[s * num_actions + a].mean();
    }

    // Optimal policy: per-state argmax mean, ties to the lowest index.
    DeterministicPolicy optimal_policy() const {
        DeterministicPolicy pi;
        pi.action_of.resize(num_states, 0);
        for (std::size_t s = 0; s < num_states; ++s) {
            Real best = reward_mean(s, 0);
            for (std::size_t a = 1; a < num_actions; ++a) {
                const Real m = reward_mean(s, a);
                if (m > best) { best = m; pi.action_of[s] = static_cast<std::uint32_t>(a); }
            }
        }
        return pi;
    }

    Real value_of(const DeterministicPolicy& pi) const {
        Real j = 0;
        for (std::size_t s = 0; s < num_states; ++s) j += rho[s] * reward_mean(s, pi(s));
        return j;
    }

    void validate() const {
        if (num_states == 0 || num_actions == 0)
            throw std::invalid_argument("cb: empty state or action space");
        if (rho.size() != num_states || rewards.size() != num_states * num_actions ||
            mu.size() != num_states * num_actions)
            throw std::invalid_argument("cb: mismatched tables");
        check_probability_vector(rho, 0, num_states, "cb rho");
        check_probability_vector(mu, 0, mu.size(), "cb mu");
    }
};

}  // namespace pessimlab
