#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace dmso {

// Counter-based generator: output k of a stream is mix(key + k * golden).
// Streams are derived from a parent key and a tag, so any sub-computation
// can own its stream without consuming draws from its siblings.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    Rng split(std::uint64_t tag) const {
        Rng child;
        child.key_ = mix(key_ ^ mix(tag + 0x9e3779b97f4a7c15ULL));
        return child;
    }

    std::uint64_t next() {
        counter_ += kGolden;
        return mix(key_ + counter_);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: empty range");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    // Index drawn from a pmf by inversion; falls back to the last positive entry
    // when roundoff leaves the cumulative sum short of u.
    template <typename Derived>
    Eigen::Index categorical(const Eigen::MatrixBase<Derived>& pmf) {
        const double u = uniform();
        double acc = 0.0;
        Eigen::Index last = -1;
        for (Eigen::Index i = 0; i < pmf.size(); ++i) {
            if (pmf(i) <= 0.0) continue;
            last = i;
            acc += pmf(i);
            if (u < acc) return i;
        }
        if (last < 0) throw std::invalid_argument("Rng::categorical: no positive mass");
        return last;
    }

    double exponential() { return -std::log1p(-uniform()); }

    Eigen::VectorXd dirichlet_flat(Eigen::Index k) {
        Eigen::VectorXd w(k);
        for (Eigen::Index i = 0; i < k; ++i) w(i) = exponential();
        return w / w.sum();
    }

    std::uint64_t key() const { return key_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace dmso
