#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dmso/model.hpp"
#include "dmso/rng.hpp"

using namespace dmso;

TEST_CASE("check_pmf") {
    CHECK_NOTHROW(check_pmf(Vector::Constant(4, 0.25), "x"));
    CHECK_THROWS_AS(check_pmf((Vector(2) << 0.6, 0.5).finished(), "x"), std::invalid_argument);
    CHECK_THROWS_AS(check_pmf((Vector(2) << 1.1, -0.1).finished(), "x"), std::invalid_argument);
    CHECK_THROWS_AS(check_pmf((Vector(2) << NAN, 1.0).finished(), "x"), std::invalid_argument);
}

TEST_CASE("model construction rejects bad kernels") {
    Kernel k(2, 2);
    k << 0.5, 0.5, 0.3, 0.6;
    CHECK_THROWS_AS(FiniteModel((Vector(2) << 0.0, 1.0).finished(), 0, k), std::invalid_argument);
    Kernel wide(2, 3);
    wide << 0.5, 0.25, 0.25, 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(FiniteModel((Vector(2) << 0.0, 1.0).finished(), 0, wide), std::invalid_argument);
    Kernel ok(1, 2);
    ok << 0.5, 0.5;
    CHECK_THROWS_AS(FiniteModel((Vector(2) << 0.0, 1.5).finished(), 0, ok), std::invalid_argument);
}

TEST_CASE("mab means and gaps") {
    const FiniteModel m = make_mab({0.7, 0.5, 0.2});
    CHECK(m.decisions() == 3);
    CHECK(m.means()(0) == doctest::Approx(0.7));
    CHECK(mean_reward(m, 2) == doctest::Approx(0.2));
    CHECK(m.best_index() == 0);
    CHECK(m.gaps()(1) == doctest::Approx(0.2));
    CHECK(m.gaps()(2) == doctest::Approx(0.5));
    CHECK(suboptimality(m, Dist::Constant(3, 1.0 / 3.0)) == doctest::Approx(0.7 / 3.0));
    const auto [best, value] = best_decision(m);
    CHECK(best == 0);
    CHECK(value == doctest::Approx(0.7));
}

TEST_CASE("mab class layout") {
    const ModelClass c = make_mab_class(0.2, 3);
    REQUIRE(c.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(c[i].best_index() == static_cast<int>(i));
        CHECK(c[i].best_value() == doctest::Approx(0.7));
        CHECK(c[i].gaps().maxCoeff() == doctest::Approx(0.2));
    }
    CHECK_THROWS_AS(make_mab_class(0.6, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_mab_class(0.1, 0), std::invalid_argument);
}

TEST_CASE("mixtures are linear in the kernel") {
    const ModelClass c = make_random_class(4, 3, 3, {0.0, 0.5, 1.0}, 2);
    const Vector w = (Vector(3) << 0.2, 0.3, 0.5).finished();
    const FiniteModel mix = mix_models(c.models(), w);
    Kernel expect = 0.2 * c[0].kernel() + 0.3 * c[1].kernel() + 0.5 * c[2].kernel();
    CHECK((mix.kernel() - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(mix.means().isApprox(0.2 * c[0].means() + 0.3 * c[1].means() + 0.5 * c[2].means()));
    const MixtureModel mm{&c, w};
    CHECK(mixture_materialize(mm) == mix);
    CHECK(mix_models(c.models(), Vector::Unit(3, 1)) == c[1]);
}

TEST_CASE("density ratio") {
    const ModelClass c = make_mab_class(0.2, 2);
    const DensityRatio v = density_ratio_bound(c);
    REQUIRE_FALSE(v.unbounded);
    CHECK(v.value == doctest::Approx(std::exp(1.0)));  // 0.7/0.5 is below the floor
    const ModelClass far(std::vector<FiniteModel>{make_mab({0.9}), make_mab({0.05})});
    CHECK(density_ratio_bound(far).value == doctest::Approx(18.0));
    const ModelClass zero(std::vector<FiniteModel>{make_mab({1.0}), make_mab({0.5})});
    CHECK(density_ratio_bound(zero).unbounded);
}

TEST_CASE("localize") {
    const ModelClass c(std::vector<FiniteModel>{make_mab({0.5, 0.6}), make_mab({0.9, 0.1}), make_mab({0.55, 0.5})});
    const FiniteModel ref = make_mab({0.5, 0.5});
    CHECK(localize(c, ref, 0.12) == std::vector<std::size_t>{0, 2});
    CHECK(localize(c, ref, 0.5) == std::vector<std::size_t>{0, 1, 2});
    CHECK(localize(c, ref, 0.0).empty());
    // two-sided also needs ref_value <= f^M(pi_ref) + alpha; ref's best is arm 0
    const FiniteModel high = make_mab({0.7, 0.5});
    CHECK(localize(c, high, 0.17) == std::vector<std::size_t>{0, 2});
    CHECK(localize(c, high, 0.17, LocalizeMode::two_sided) == std::vector<std::size_t>{2});
    CHECK(localize(c, high, 0.1, LocalizeMode::two_sided).empty());
}

TEST_CASE("revealing class structure") {
    const ModelClass c = make_revealing_class(0.5, 0.25, 3);
    REQUIRE(c.size() == 4);
    CHECK(c.decisions() == 4);
    CHECK(c.obs_count() == 4);
    for (int i = 0; i < 3; ++i) {
        CHECK(c[i].best_index() == i);
        CHECK(c[i].best_value() == doctest::Approx(1.0));
        CHECK(c[i].means()(3) == doctest::Approx(0.0));
        CHECK(c[i].prob(3, 0, i + 1) == doctest::Approx(0.25));
    }
    CHECK(c[3].means().head(3).isApproxToConstant(0.5));
    CHECK(c[3].prob(3, 0, 2) == doctest::Approx(0.25 / 3));
    CHECK(make_revealing_class(0.5, 0.25, 3, false).size() == 3);
    CHECK_THROWS_AS(make_revealing_class(0.7, 0.25, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_revealing_class(0.5, 0.0, 3), std::invalid_argument);
}

TEST_CASE("union class observations factorize") {
    const ModelClass c = make_union_class(0.25, 3);
    REQUIRE(c.size() == 3);
    // P(bit i on) at the revealing decision is 1/2 except 3/4 for the model's own arm
    for (std::size_t a = 0; a < 3; ++a)
        for (int bit = 0; bit < 3; ++bit) {
            double on = 0.0;
            for (int mask = 0; mask < 8; ++mask)
                if ((mask >> bit) & 1) on += c[a].prob(3, 0, 1 + mask);
            CHECK(on == doctest::Approx(bit == static_cast<int>(a) ? 0.75 : 0.5));
        }
}

TEST_CASE("subset and equality") {
    const ModelClass c = make_mab_class(0.1, 4);
    const ModelClass s = c.subset({3, 1});
    REQUIRE(s.size() == 2);
    CHECK(s[0] == c[3]);
    CHECK(s.labels()[1] == "arm1");
    CHECK_FALSE(c[0] == c[1]);
    CHECK(make_random_class(9, 3, 2, {0.0, 1.0}, 0) == make_random_class(9, 3, 2, {0.0, 1.0}, 0));
    CHECK_FALSE(make_random_class(9, 3, 2, {0.0, 1.0}, 0) == make_random_class(10, 3, 2, {0.0, 1.0}, 0));
}

TEST_CASE("rng streams") {
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    Rng p(5);
    CHECK(p.split(1).key() != p.split(2).key());
    CHECK(p.split(1).key() == Rng(5).split(1).key());
    // a child stream does not depend on how many draws the parent made
    Rng used(5);
    used.next();
    CHECK(used.split(1).key() == p.split(1).key());
    Rng r(11);
    int counts[3] = {0, 0, 0};
    const Vector pmf = (Vector(3) << 0.2, 0.0, 0.8).finished();
    for (int i = 0; i < 20000; ++i) ++counts[r.categorical(pmf)];
    CHECK(counts[1] == 0);
    CHECK(std::abs(counts[0] / 20000.0 - 0.2) < 0.02);
    for (int i = 0; i < 100; ++i) CHECK(r.below(7) < 7);
    CHECK_THROWS(r.below(0));
}
