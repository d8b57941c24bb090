#include <doctest.h>

#include <stdexcept>

#include "dmso/adversary.hpp"
#include "dmso/e2d.hpp"

using namespace dmso;

namespace {

AlgorithmRunner constant_arm(int arm) {
    return [arm](const FiniteModel& env, std::uint64_t) {
        const Dist e = Dist::Unit(env.decisions(), arm);
        return RunBehavior{e, e};
    };
}

}  // namespace

TEST_CASE("constant arm is caught") {
    const ModelClass c = make_mab_class(0.3, 3);
    AdversaryConfig cfg;
    cfg.T = 100;
    cfg.mc_runs = 5;
    const AdversaryReport r = adversary_hard_pair_pac(c, constant_arm(0), make_flat_reference(3), cfg);
    REQUIRE(r.feasible);
    CHECK_FALSE(r.degenerate);
    // models 1 and 2 agree with the flat reference on arm 0
    CHECK(r.feasible_set == std::vector<std::size_t>{1, 2});
    CHECK(r.max_risk() == doctest::Approx(0.3));
    CHECK(r.se_m1 == 0.0);
    CHECK(r.p_bar == Dist::Unit(3, 0));
    // the density ratio of this class is below e, so C(T) = 256 log e
    CHECK(r.eps == doctest::Approx(1.0 / (10.0 * std::sqrt(256.0 * 100))));
}

TEST_CASE("singleton class is degenerate") {
    const ModelClass one(std::vector<FiniteModel>{make_mab({0.2, 0.5})});
    AdversaryConfig cfg;
    cfg.T = 10;
    cfg.mc_runs = 3;
    const AdversaryReport r = adversary_hard_pair_pac(one, constant_arm(0), one[0], cfg);
    CHECK(r.degenerate);
    CHECK(r.feasible);
    CHECK(r.m1 == 0);
    CHECK(r.m2 == 0);
    CHECK(r.m2_fallback);
    CHECK(r.max_risk() == doctest::Approx(0.3));
}

TEST_CASE("no close model is reported, not thrown") {
    const ModelClass c = make_mab_class(0.3, 2);
    AdversaryConfig cfg;
    cfg.T = 10;
    cfg.mc_runs = 2;
    cfg.eps = 1e-3;
    const AdversaryReport r = adversary_hard_pair_pac(c, constant_arm(0), make_mab({0.1, 0.9}), cfg);
    CHECK_FALSE(r.feasible);
    CHECK(r.message.find("DEC condition unmet") != std::string::npos);
    CHECK_THROWS(adversary_hard_pair_pac(c, constant_arm(0), make_flat_reference(3), cfg));
    cfg.T = 0;
    CHECK_THROWS(adversary_hard_pair_pac(c, constant_arm(0), make_flat_reference(2), cfg));
}

TEST_CASE("adversary is deterministic and conditions on small gaps") {
    const ModelClass c = make_mab_class(0.3, 3);
    PacConfig pc;
    pc.T = 50;
    pc.keep_transcript = false;
    const AlgorithmRunner alg = [&](const FiniteModel& env, std::uint64_t seed) {
        const PacRunResult r = run_pac_env(c, env, pc, seed);
        return RunBehavior{r.p_hat, r.q_mean};
    };
    AdversaryConfig cfg;
    cfg.T = 50;
    cfg.mc_runs = 30;
    cfg.seed = 7;
    // at the default radius no model of this fixed-gap class survives both balls
    cfg.eps = 0.4;
    const AdversaryReport a = adversary_hard_pair_pac(c, alg, make_flat_reference(3), cfg);
    const AdversaryReport b = adversary_hard_pair_pac(c, alg, make_flat_reference(3), cfg);
    REQUIRE(a.feasible);
    CHECK(a.risks_m1 == b.risks_m1);
    CHECK(a.m2 == b.m2);
    CHECK(a.risks_m1.size() == 30);
    CHECK(a.p_bar.sum() == doctest::Approx(1.0));
    CHECK(a.q_bar.sum() == doctest::Approx(1.0));
    if (!a.m2_fallback) CHECK(a.mass_outside >= kMinConditioningMass);
    CHECK(a.tv_proxy >= 0.0);
    CHECK(a.tv_proxy <= 1.0);
}
