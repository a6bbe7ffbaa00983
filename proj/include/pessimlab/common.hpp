#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pessimlab {

using Real = double;

constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Thrown when a dataset is too small for the requested operation
// (e.g. fewer records than folds).
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a dataset contains out-of-range indices or otherwise
// violates its declared shape.
struct MalformedDatasetError : std::runtime_error {
    explicit MalformedDatasetError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by instance constructors when the requested parameters cannot
// produce a valid instance.
struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Counter-based pseudorandom numbers.
//
// Every random draw in the project is a pure function of (key, counter).
// Streams are derived by mixing identifiers into the key, so independent
// work items can be sampled in any order, on any number of threads, and
// reproduce bit-exactly.
// ---------------------------------------------------------------------------

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (mix64(b) + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b), c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix64(mix64(a, b, c), d);
}

// Stateless stream: value i of stream `key` (splitmix64 at position i).
inline std::uint64_t rand_at(std::uint64_t key, std::uint64_t i) {
    std::uint64_t z = key + (i + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline Real uniform_at(std::uint64_t key, std::uint64_t i) {
    return static_cast<Real>(rand_at(key, i) >> 11) * 0x1.0p-53;
}

// Convenience stateful wrapper around the counter stream.
class Rng {
  public:
    explicit Rng(std::uint64_t key) : key_(key), ctr_(0) {}

    std::uint64_t next_u64() { return rand_at(key_, ctr_++); }
    Real next_uniform() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n up to 2^63; modulo bias is < 2^-53.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(next_uniform() * static_cast<Real>(n)) % n;
    }

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

// Inverse-CDF draw from a cumulative table (last entry ~ 1).
inline std::size_t sample_cdf(const std::vector<Real>& cdf, Real u) {
    std::size_t lo = 0, hi = cdf.size();
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (u < cdf[mid - 1]) hi = mid; else lo = mid;
    }
    return lo;
}

inline std::vector<Real> cumulative(const std::vector<Real>& p) {
    std::vector<Real> cdf(p.size());
    Real acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) { acc += p[i]; cdf[i] = acc; }
    return cdf;
}

// ---------------------------------------------------------------------------
// Small numerics helpers.
// ---------------------------------------------------------------------------

struct OlsFit {
    Real slope = 0;
    Real intercept = 0;
    Real slope_stderr = 0;
    std::size_t n = 0;
};

inline OlsFit ols(const std::vector<Real>& x, const std::vector<Real>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols: need >= 2 paired points");
    const std::size_t n = x.size();
    Real mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<Real>(n);
    my /= static_cast<Real>(n);
    Real sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) throw std::invalid_argument("ols: degenerate x values");
    OlsFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    Real rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Real e = y[i] - (f.intercept + f.slope * x[i]);
        rss += e * e;
    }
    f.slope_stderr = n > 2 ? std::sqrt(rss / static_cast<Real>(n - 2) / sxx) : 0;
    return f;
}

struct MeanStderr {
    Real mean = 0;
    Real stderr_ = 0;
    std::size_t count = 0;
};

inline MeanStderr mean_stderr(const std::vector<Real>& v) {
    MeanStderr m;
    m.count = v.size();
    if (v.empty()) return m;
    Real s = 0;
    for (Real x : v) s += x;
    m.mean = s / static_cast<Real>(v.size());
    if (v.size() < 2) return m;
    Real ss = 0;
    for (Real x : v) ss += (x - m.mean) * (x - m.mean);
    m.stderr_ = std::sqrt(ss / static_cast<Real>(v.size() - 1) / static_cast<Real>(v.size()));
    return m;
}

// KL divergence between Bernoulli(p) and Bernoulli(q), natural log.
inline Real bernoulli_kl(Real p, Real q) {
    auto term = [](Real a, Real b) { return a <= 0 ? Real(0) : a * std::log(a / b); };
    return term(p, q) + term(1 - p, 1 - q);
}

}  // namespace pessimlab
