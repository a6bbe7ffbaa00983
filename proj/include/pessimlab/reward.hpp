#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pessimlab/common.hpp"

namespace pessimlab {

// A reward distribution on [0,1]: deterministic, Bernoulli, or finite
// discrete. Exact means are always available.
class RewardDistribution {
  public:
    enum class Kind { Deterministic, Bernoulli, Discrete };

    RewardDistribution() : kind_(Kind::Deterministic), values_{0.0} {}

    static RewardDistribution deterministic(Real v) {
        check_unit(v, "deterministic reward");
        RewardDistribution r;
        r.kind_ = Kind::Deterministic;
        r.values_ = {v};
        return r;
    }

    static RewardDistribution bernoulli(Real mean) {
        check_unit(mean, "bernoulli mean");
        RewardDistribution r;
        r.kind_ = Kind::Bernoulli;
        r.values_ = {mean};
        return r;
    }

    // Bernoulli on {0, hi} with P(hi) = p (used by several constructions).
    static RewardDistribution scaled_bernoulli(Real hi, Real p) {
        return discrete({0.0, hi}, {1 - p, p});
    }

    static RewardDistribution discrete(std::vector<Real> values, std::vector<Real> probs) {
        if (values.size() != probs.size() || values.empty())
            throw std::invalid_argument("discrete reward: mismatched support/probabilities");
        Real total = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            check_unit(values[i], "discrete reward support value");
            if (probs[i] < 0) throw std::invalid_argument("discrete reward: negative probability");
            total += probs[i];
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("discrete reward: probabilities must sum to 1");
        RewardDistribution r;
        r.kind_ = Kind::Discrete;
        r.values_ = std::move(values);
        r.probs_ = std::move(probs);
        r.cdf_ = cumulative(r.probs_);
        return r;
    }

    Kind kind() const { return kind_; }

    Real mean() const {
        switch (kind_) {
            case Kind::Deterministic: return values_[0];
            case Kind::Bernoulli: return values_[0];
            case Kind::Discrete: {
                Real m = 0;
                for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
                return m;
            }
        }
        return 0;
    }

    Real sample(Real u) const {
        switch (kind_) {
            case Kind::Deterministic: return values_[0];
            case Kind::Bernoulli: return u < values_[0] ? 1.0 : 0.0;
            case Kind::Discrete: return values_[sample_cdf(cdf_, u)];
        }
        return 0;
    }

    // True iff r lies in the support (up to fp equality for atoms).
    bool in_support(Real r) const {
        switch (kind_) {
            case Kind::Deterministic: return r == values_[0];
            case Kind::Bernoulli: return r == 0.0 || r == 1.0;
            case Kind::Discrete:
                for (Real v : values_)
                    if (r == v) return true;
                return false;
        }
        return false;
    }

    const std::vector<Real>& support() const { return values_; }
    const std::vector<Real>& probabilities() const { return probs_; }

  private:
    static void check_unit(Real v, const char* what) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
    }

    Kind kind_;
    std::vector<Real> values_;
    std::vector<Real> probs_;  // Discrete only
    std::vector<Real> cdf_;    // Discrete only
};

}  // namespace pessimlab
