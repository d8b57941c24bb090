#include "dmso/adversary.hpp"

#include <cmath>
#include <stdexcept>

#include "dmso/dec.hpp"
#include "dmso/rng.hpp"

namespace dmso {

namespace {

struct RiskSample {
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> values;
    Dist p_mean;
};

RiskSample measure(const FiniteModel& env, const AlgorithmRunner& alg, int runs, const Rng& stream) {
    RiskSample s;
    s.p_mean = Dist::Zero(env.decisions());
    for (int k = 0; k < runs; ++k) {
        Rng r = stream.split(static_cast<std::uint64_t>(k));
        const RunBehavior b = alg(env, r.next());
        s.values.push_back(env.gaps().dot(b.p));
        s.p_mean += b.p;
    }
    s.p_mean /= runs;
    for (double v : s.values) s.mean += v;
    s.mean /= runs;
    if (runs > 1) {
        double ss = 0.0;
        for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
        s.se = std::sqrt(ss / (runs - 1) / runs);
    }
    return s;
}

std::size_t argmax_over(const ModelClass& cls, const std::vector<std::size_t>& set, const Dist& p) {
    std::size_t best = set.front();
    double value = cls[best].gaps().dot(p);
    for (std::size_t i : set) {
        const double v = cls[i].gaps().dot(p);
        if (v > value) {
            value = v;
            best = i;
        }
    }
    return best;
}

}  // namespace

AdversaryReport adversary_hard_pair_pac(const ModelClass& cls, const AlgorithmRunner& alg, const FiniteModel& ref,
                                        const AdversaryConfig& cfg) {
    if (cfg.T < 1) throw std::invalid_argument("adversary: T < 1");
    if (cfg.mc_runs < 1) throw std::invalid_argument("adversary: mc_runs < 1");
    if (!ref.same_spaces(cls[0])) throw std::invalid_argument("adversary: reference spaces differ from the class");
    const int risk_runs = cfg.risk_runs > 0 ? cfg.risk_runs : cfg.mc_runs;
    const Rng root(cfg.seed);

    AdversaryReport rep;
    rep.ct = ct_factor(cfg.T, density_ratio_bound(cls), cfg.ct);
    rep.eps = cfg.eps ? *cfg.eps : 1.0 / (10.0 * std::sqrt(rep.ct * static_cast<double>(cfg.T)));
    rep.delta_dec = cfg.delta_dec ? *cfg.delta_dec
                                  : constrained_dec(cls, ref, rep.eps / std::sqrt(2.0), Variant::constrained_pac,
                                                    false)
                                        .value;

    rep.p_bar = Dist::Zero(ref.decisions());
    rep.q_bar = Dist::Zero(ref.decisions());
    const Rng under_ref = root.split(1);
    for (int k = 0; k < cfg.mc_runs; ++k) {
        Rng r = under_ref.split(static_cast<std::uint64_t>(k));
        const RunBehavior b = alg(ref, r.next());
        rep.p_bar += b.p;
        rep.q_bar += b.q;
    }
    rep.p_bar /= cfg.mc_runs;
    rep.q_bar /= cfg.mc_runs;

    if (cls.size() == 1) {
        rep.degenerate = true;
        rep.feasible_set = {0};
    } else {
        for (std::size_t i = 0; i < cls.size(); ++i)
            if (in_ball(cls[i], ref, rep.q_bar, rep.eps) && in_ball(cls[i], ref, rep.p_bar, rep.eps))
                rep.feasible_set.push_back(i);
        if (rep.feasible_set.empty()) {
            rep.message = "DEC condition unmet at this eps: no model is close to the reference under both p and q";
            return rep;
        }
    }
    rep.feasible = true;
    rep.m1 = argmax_over(cls, rep.feasible_set, rep.p_bar);

    const double threshold = cfg.c0 * rep.delta_dec;
    const Vector& g1 = cls[rep.m1].gaps();
    Dist conditioned = Dist::Zero(rep.p_bar.size());
    for (Eigen::Index a = 0; a < rep.p_bar.size(); ++a)
        if (g1(a) < threshold) conditioned(a) = rep.p_bar(a);
    rep.mass_outside = conditioned.sum();
    if (rep.degenerate || rep.mass_outside < kMinConditioningMass) {
        rep.m2 = rep.m1;
        rep.m2_fallback = true;
    } else {
        rep.m2 = argmax_over(cls, rep.feasible_set, conditioned / rep.mass_outside);
    }

    RiskSample s1 = measure(cls[rep.m1], alg, risk_runs, root.split(2));
    rep.risk_m1 = s1.mean;
    rep.se_m1 = s1.se;
    rep.risks_m1 = std::move(s1.values);
    if (rep.m2 == rep.m1) {
        rep.risk_m2 = rep.risk_m1;
        rep.se_m2 = rep.se_m1;
        rep.risks_m2 = rep.risks_m1;
        rep.tv_proxy = 0.0;
    } else {
        RiskSample s2 = measure(cls[rep.m2], alg, risk_runs, root.split(3));
        rep.risk_m2 = s2.mean;
        rep.se_m2 = s2.se;
        rep.risks_m2 = std::move(s2.values);
        rep.tv_proxy = tv(s1.p_mean, s2.p_mean);
    }
    return rep;
}

}  // namespace dmso
