#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

#include "dmso/model.hpp"

namespace dmso {

inline constexpr double kBallSlack = 1e-12;

namespace detail {

template <typename A, typename B>
void check_pair(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("divergence: length mismatch");
    check_pmf(a.derived().template cast<double>().eval(), "divergence input");
    check_pmf(b.derived().template cast<double>().eval(), "divergence input");
}

}  // namespace detail

// Squared Hellinger distance, sum of (sqrt a - sqrt b)^2, in [0,2].
template <typename A, typename B>
double hellinger_sq(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    detail::check_pair(a, b);
    return (a.derived().array().sqrt() - b.derived().array().sqrt()).square().sum();
}

template <typename A, typename B>
double tv(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    detail::check_pair(a, b);
    return 0.5 * (a.derived().array() - b.derived().array()).abs().sum();
}

// Per-decision squared Hellinger distances between two models.
Vector hellinger_rows(const FiniteModel& a, const FiniteModel& b);

double expected_hellinger_sq(const FiniteModel& a, const FiniteModel& b, const Dist& p);

// M in the ball H_{p,eps}(ref), with kBallSlack absolute slack.
bool in_ball(const FiniteModel& m, const FiniteModel& ref, const Dist& p, double eps);

enum class CtConvention { statement, proof };

// Log factor of the lower-bound radius: log(T ^ V), floored at 1 so that it
// never vanishes at T < 3; the proof convention multiplies it by 2^8.
double ct_factor(long T, const DensityRatio& v, CtConvention convention);

// One round of an enumerated transcript.
struct Step {
    int decision;
    int outcome;  // column index into the kernel
};

// A history-dependent algorithm: maps the history so far to q^t.
using Policy = std::function<Dist(std::span<const Step>)>;

struct TvUbReport {
    double lhs = 0.0;           // D^2_H between transcript laws
    double expected_div = 0.0;  // T * E_{q-bar}[D^2_H(M, M-bar)]
    double ct_statement = 0.0;
    double ct_proof = 0.0;
    double slack_statement = 0.0;  // ct_statement * expected_div - lhs
    double slack_proof = 0.0;
    Dist q_bar;
    long transcripts = 0;
};

// Exhaustive enumeration of all T-round transcripts; refuses when the
// number of leaves exceeds max_leaves.
TvUbReport tv_ub_check(const FiniteModel& m, const FiniteModel& ref, const Policy& alg, int T,
                       const DensityRatio& v, long max_leaves = 2'000'000);

}  // namespace dmso
