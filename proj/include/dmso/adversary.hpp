#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dmso/divergence.hpp"
#include "dmso/model.hpp"

namespace dmso {

// What a PAC algorithm did in one run: its final decision distribution p and
// the average exploration distribution q.
struct RunBehavior {
    Dist p;
    Dist q;
};

using AlgorithmRunner = std::function<RunBehavior(const FiniteModel& env, std::uint64_t seed)>;

struct AdversaryConfig {
    long T = 0;
    CtConvention ct = CtConvention::proof;
    std::optional<double> eps;  // default 1 / (10 sqrt(C(T) T))
    int mc_runs = 10000;        // transcripts under the reference
    int risk_runs = 0;          // transcripts under each of M1, M2; 0 means mc_runs
    double c0 = 1.0 / 16.0;
    std::uint64_t seed = 0;
    std::optional<double> delta_dec;  // default: constrained pac DEC at eps / sqrt 2
};

struct AdversaryReport {
    bool feasible = false;
    bool degenerate = false;  // singleton class
    std::string message;
    double eps = 0.0;
    double ct = 0.0;
    double delta_dec = 0.0;
    Dist p_bar, q_bar;
    std::vector<std::size_t> feasible_set;
    std::size_t m1 = 0, m2 = 0;
    double mass_outside = 0.0;  // p_bar mass where g^{M1} < c0 delta_dec
    bool m2_fallback = false;   // that mass was below 1e-3, so M2 = M1
    double risk_m1 = 0.0, se_m1 = 0.0;
    double risk_m2 = 0.0, se_m2 = 0.0;
    std::vector<double> risks_m1, risks_m2;  // per run
    double tv_proxy = 0.0;  // TV between the mean final distributions under M1 and M2
    double max_risk() const { return std::max(risk_m1, risk_m2); }
};

inline constexpr double kMinConditioningMass = 1e-3;

// Hard-pair construction for PAC lower bounds: estimate the algorithm's
// behavior under the reference, pick two models that it cannot tell apart
// from the reference but whose good decisions differ, and measure its risk
// under both.
AdversaryReport adversary_hard_pair_pac(const ModelClass& cls, const AlgorithmRunner& alg, const FiniteModel& ref,
                                        const AdversaryConfig& cfg);

}  // namespace dmso
