#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmso/dec.hpp"
#include "dmso/divergence.hpp"
#include "dmso/rng.hpp"
#include "oracles.hpp"

using namespace dmso;

namespace {

// Two or three decisions, a few clustered Bernoulli models.
ModelClass small_class(std::uint64_t seed, int decisions, int models) {
    Rng r(seed);
    std::vector<double> base(decisions);
    for (auto& b : base) b = 0.3 + 0.4 * r.uniform();
    std::vector<FiniteModel> ms;
    for (int i = 0; i < models; ++i) {
        std::vector<double> m(base);
        for (auto& x : m) x = std::clamp(x + 0.3 * (2 * r.uniform() - 1), 0.02, 0.98);
        ms.push_back(make_mab(m));
    }
    return ModelClass(std::move(ms));
}

bool is_pmf(const Dist& p) { return (p.array() >= -1e-12).all() && std::abs(p.sum() - 1.0) < 1e-9; }

}  // namespace

TEST_CASE("offset regret on mab2 against the grid") {
    const ModelClass c = make_mab_class(0.2, 2);
    const DecValue d = offset_dec(c, c[0], 10.0, Variant::offset_regret);
    const double grid = oracle::offset_regret(c.models(), c[0], 10.0, 1000);
    CHECK(d.value <= grid + 1e-9);
    CHECK(grid <= d.value + 2e-3);
    CHECK(is_pmf(d.witness_p));
    CHECK(d.diag.lower == d.value);
    CHECK(d.diag.upper == d.value);
}

TEST_CASE("offset regret against the grid on random instances") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int n = 2 + static_cast<int>(s % 2);
        const ModelClass c = small_class(s, n, 3 + static_cast<int>(s % 3));
        const FiniteModel ref = small_class(s + 100, n, 1)[0];
        for (double g : {0.5, 4.0}) {
            const double v = offset_dec(c, ref, g, Variant::offset_regret).value;
            const double grid = oracle::offset_regret(c.models(), ref, g, n == 2 ? 2000 : 300);
            CHECK(v <= grid + 1e-9);
            CHECK(grid <= v + (n == 2 ? 2e-3 : 3e-2));
        }
    }
}

TEST_CASE("mab offset with a member reference is at most 1/gamma") {
    for (int arms : {2, 3, 4})
        for (double gap : {0.05, 0.25, 0.5}) {
            const ModelClass c = make_mab_class(gap, arms);
            for (double g : {0.1, 1.0, 10.0, 100.0})
                CHECK(offset_dec(c, c[0], g, Variant::offset_regret).value <= 1.0 / g + 1e-9);
        }
}

TEST_CASE("offset at vanishing gamma is the game value") {
    const ModelClass c = small_class(7, 3, 4);
    const FiniteModel ref = small_class(8, 3, 1)[0];
    const double gv = game_value(make_game(c, ref, false));
    CHECK(offset_dec(c, ref, 1e-9, Variant::offset_regret).value == doctest::Approx(gv).epsilon(1e-7));
    CHECK(offset_dec(c, ref, 1e-9, Variant::offset_pac).value == doctest::Approx(gv).epsilon(1e-7));
    CHECK_THROWS_AS(offset_dec(c, ref, 0.0, Variant::offset_regret), std::invalid_argument);
}

TEST_CASE("offset pac is at most offset regret") {
    // q = p is feasible for the pac program
    for (std::uint64_t s = 0; s < 10; ++s) {
        const ModelClass c = small_class(s, 3, 4);
        const FiniteModel ref = small_class(s + 50, 3, 1)[0];
        for (double g : {0.3, 3.0}) {
            const DecValue pac = offset_dec(c, ref, g, Variant::offset_pac);
            CHECK(pac.value <= offset_dec(c, ref, g, Variant::offset_regret).value + 1e-9);
            REQUIRE(pac.witness_q);
            CHECK(is_pmf(*pac.witness_q));
        }
    }
}

TEST_CASE("constrained regret against the grid") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int n = 2 + static_cast<int>(s % 2);
        const ModelClass c = small_class(s + 1000, n, 3 + static_cast<int>(s % 3));
        const FiniteModel ref = small_class(s + 2000, n, 1)[0];
        for (double eps : {0.05, 0.15, 0.4}) {
            const DecValue d = constrained_dec(c, ref, eps, Variant::constrained_regret, false);
            const double grid = oracle::constrained_regret(c.models(), ref, eps, n == 2 ? 4000 : 400);
            CAPTURE(s);
            CAPTURE(eps);
            CHECK(d.diag.lower <= d.value + 1e-12);
            CHECK(d.value <= d.diag.upper + 1e-12);
            CHECK(d.diag.lower <= grid + 1e-9);
            CHECK(grid <= d.diag.upper + 1e-2);
            CHECK(d.diag.exact);
            CHECK(is_pmf(d.witness_p));
            CHECK(constrained_objective(make_game(c, ref, false), eps, Variant::constrained_regret, d.witness_p,
                                        d.witness_p) == doctest::Approx(d.diag.upper));
        }
    }
}

TEST_CASE("constrained pac against the grid") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const ModelClass c = small_class(s + 3000, 2, 3 + static_cast<int>(s % 3));
        const FiniteModel ref = small_class(s + 4000, 2, 1)[0];
        for (double eps : {0.05, 0.2}) {
            const DecValue d = constrained_dec(c, ref, eps, Variant::constrained_pac, false);
            const double grid = oracle::constrained_pac(c.models(), ref, eps, 400);
            CHECK(d.diag.lower <= grid + 1e-9);
            CHECK(grid <= d.diag.upper + 1e-2);
            REQUIRE(d.witness_q);
            CHECK(is_pmf(*d.witness_q));
        }
    }
}

TEST_CASE("constrained edge cases") {
    const ModelClass c = make_mab_class(0.2, 2);
    // a ball of radius sqrt 2 holds everything
    const FiniteModel flat = make_flat_reference(2);
    const double gv = game_value(make_game(c, flat, false));
    CHECK(constrained_dec(c, flat, std::sqrt(2.0), Variant::constrained_regret, false).value ==
          doctest::Approx(gv));
    CHECK(gv == doctest::Approx(0.1));
    // eps = 0 with a member reference: its own best arm excludes the other model
    const DecValue zero = constrained_dec(c, c[0], 0.0, Variant::constrained_regret, false);
    CHECK(zero.value == 0.0);
    CHECK(zero.witness_p(0) == doctest::Approx(1.0));
    // no model is ever close: value exactly 0 and nothing active
    const DecValue empty = constrained_dec(c, make_mab({0.05, 0.05}), 0.1, Variant::constrained_regret, false);
    CHECK(empty.value == 0.0);
    CHECK(empty.active_set.empty());
    CHECK_THROWS_AS(constrained_dec(c, flat, -0.1, Variant::constrained_regret, false), std::invalid_argument);
}

TEST_CASE("mab with the flat reference grows like eps sqrt A") {
    for (int arms : {2, 3}) {
        for (double eps : {0.05, 0.1}) {
            // half of eps sqrt A keeps every model inside the ball under any p
            const double gap = 0.5 * eps * std::sqrt(static_cast<double>(arms));
            const ModelClass c = make_mab_class(gap, arms);
            const FiniteModel flat = make_flat_reference(arms);
            const DecValue d = constrained_dec(c, flat, eps, Variant::constrained_regret, true);
            std::vector<FiniteModel> adv = c.models();
            adv.push_back(flat);
            const double grid = oracle::constrained_regret(adv, flat, eps, arms == 2 ? 4000 : 400);
            CHECK(d.diag.lower <= grid + 1e-9);
            CHECK(grid <= d.diag.upper + 1e-3);
            CHECK(d.value == doctest::Approx(gap * (1.0 - 1.0 / arms)));
        }
    }
}

TEST_CASE("pac variants are ordered") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const ModelClass c = small_class(s + 500, 3, 4);
        const FiniteModel ref = c[0];
        for (double eps : {0.1, 0.3}) {
            const DecValue pac = constrained_dec(c, ref, eps, Variant::constrained_pac, false);
            const DecValue greedy = constrained_dec(c, ref, eps, Variant::constrained_pac_greedy, false);
            const DecValue alt = constrained_dec(c, ref, eps, Variant::constrained_pac_alt, false);
            const DecValue alt2 = constrained_dec(c, ref, eps * std::sqrt(2.0), Variant::constrained_pac_alt, false);
            CHECK(pac.diag.lower <= greedy.diag.upper + 1e-9);
            CHECK(alt.diag.lower <= pac.diag.upper + 1e-9);
            CHECK(pac.diag.lower <= alt2.diag.upper + 1e-9);
        }
    }
}

TEST_CASE("bayesian dual matches the primal") {
    const ModelClass c = make_mab_class(0.2, 2);
    const double primal = offset_dec(c, c[0], 5.0, Variant::offset_regret).value;
    const DecValue dual = bayesian_offset_dec(c, c[0], 5.0);
    CHECK(dual.value == doctest::Approx(primal).epsilon(1e-9));
    REQUIRE(dual.prior);
    CHECK(is_pmf(*dual.prior));
    CHECK(oracle::bayesian_offset_regret(c.models(), c[0], 5.0, 2000) == doctest::Approx(primal).epsilon(1e-3));

    const ModelClass one(std::vector<FiniteModel>{make_mab({0.3, 0.6, 0.5})});
    const FiniteModel ref = make_mab({0.5, 0.5, 0.5});
    const Vector row = one[0].gaps() - 2.0 * hellinger_rows(one[0], ref);
    CHECK(offset_dec(one, ref, 2.0, Variant::offset_regret).value == doctest::Approx(row.minCoeff()));
    CHECK(bayesian_offset_dec(one, ref, 2.0).value == doctest::Approx(row.minCoeff()));

    for (std::uint64_t s = 0; s < 10; ++s) {
        const ModelClass r = small_class(s + 700, 3, 3);
        const FiniteModel m = small_class(s + 800, 3, 1)[0];
        for (Variant v : {Variant::offset_regret, Variant::offset_pac})
            CHECK(std::abs(offset_dec(r, m, 2.0, v).value - bayesian_offset_dec(r, m, 2.0, v).value) <= 1e-7);
        CHECK(bayesian_offset_dec(r, m, 2.0).value ==
              doctest::Approx(oracle::bayesian_offset_regret(r.models(), m, 2.0, 200)).epsilon(2e-2));
    }
}

TEST_CASE("randomized references") {
    const ModelClass c = make_mab_class(0.2, 3);
    const Vector point = Vector::Unit(3, 1);
    for (Variant v : {Variant::offset_regret, Variant::constrained_regret, Variant::offset_pac,
                      Variant::constrained_pac}) {
        const double scale = is_offset(v) ? 4.0 : 0.2;
        CHECK(randomized_dec(c, point, scale, v).value == doctest::Approx(evaluate_dec(c, c[1], scale, v, false).value));
    }
    const Vector nu = Vector::Constant(3, 1.0 / 3);
    const double rnd = randomized_dec(c, nu, 8.0, Variant::offset_regret).value;
    const FiniteModel mix = mix_models(c.models(), nu);
    CHECK(rnd <= offset_dec(c, mix, 8.0, Variant::offset_regret).value + 1e-9);

    // grid oracle for the averaged divergence
    const DecGame g = make_game(c.models(), c.models(), nu);
    double best = 1e9;
    oracle::simplex_grid(3, 300, [&](const Dist& p) { best = std::min(best, ((g.G - 8.0 * g.H) * p).maxCoeff()); });
    CHECK(rnd <= best + 1e-9);
    CHECK(best <= rnd + 1e-2);
    CHECK_THROWS(randomized_dec(c, nu, 0.2, Variant::constrained_pac_greedy));
}

TEST_CASE("profiles and regularity") {
    const ModelClass c = make_mab_class(0.2, 3);
    RefSpec given;
    given.model = make_flat_reference(3);
    const std::vector<double> grid = log_grid(0.02, 0.5, 12);
    const DecProfile p = dec_profile(c, given, grid, Variant::constrained_regret, true);
    CHECK(p.monotone);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(p.values[k].value >= p.values[k - 1].value - 1e-12);

    const DecProfile o = dec_profile(c, given, log_grid(0.1, 100, 10), Variant::offset_regret, false);
    CHECK(o.monotone);
    for (std::size_t k = 1; k < o.grid.size(); ++k) CHECK(o.values[k].value <= o.values[k - 1].value + 1e-12);

    DecProfile linear;
    linear.grid = {0.05, 0.1, 0.2, 0.4};
    for (double e : linear.grid) {
        DecValue v;
        v.value = 3 * e;
        linear.values.push_back(v);
    }
    const RegularityReport lr = regularity_check(linear, 2.0, std::sqrt(2.0));
    CHECK(lr.regular);
    REQUIRE(lr.strong);
    CHECK(*lr.strong);
    CHECK(lr.worst_ratio == doctest::Approx(2.0));

    DecProfile step;
    step.grid = {0.05, 0.1, 0.2, 0.4};
    for (double e : step.grid) {
        DecValue v;
        v.value = e >= 0.15 ? 1.0 : 0.0;
        step.values.push_back(v);
    }
    const RegularityReport sr = regularity_check(step, 2.0, std::sqrt(2.0));
    CHECK_FALSE(sr.regular);
    CHECK_FALSE(*sr.strong);
    CHECK(sr.strong_failures == std::vector<double>{0.1});
    CHECK_THROWS(regularity_check(step, 100.0));
}

TEST_CASE("hull sup") {
    const ModelClass one(std::vector<FiniteModel>{make_mab({0.3, 0.6})});
    const HullResult h = hull_sup_dec(one, 0.3, Variant::constrained_regret, true, HullGrid{});
    CHECK(h.best.value == 0.0);
    CHECK(h.references == 1);
    HullGrid grid;
    grid.resolution = 4;
    grid.dirichlet_points = 5;
    // compositions of 4 into 3 parts are 15, three of them vertices
    CHECK(hull_points(3, grid).size() == 15 + 5);
    const ModelClass c = make_mab_class(0.2, 3);
    const HullResult hs = hull_sup_dec(c, 0.2, Variant::constrained_regret, true, grid);
    CHECK(hs.best.value <= hs.upper_max + 1e-12);
    CHECK(hs.lower_max <= hs.upper_max + 1e-12);
    for (const Vector& w : hull_points(3, grid)) {
        const FiniteModel ref = mix_models(c.models(), w);
        CHECK(constrained_dec(c, ref, 0.2, Variant::constrained_regret, true).diag.lower <= hs.lower_max + 1e-12);
    }
}

TEST_CASE("enumeration cap falls back to the heuristic") {
    std::vector<FiniteModel> ms;
    for (int i = 0; i < 18; ++i) {
        std::vector<double> means{0.5 + 0.004 * i, 0.5 - 0.004 * i, 0.5};
        means[i % 3] = 0.8 - 0.01 * (i / 3);
        ms.push_back(make_mab(means));
    }
    const ModelClass c(std::move(ms));
    const FiniteModel ref = make_flat_reference(3);
    const DecValue d = constrained_dec(c, ref, 0.2, Variant::constrained_regret, false);
    CHECK_FALSE(d.diag.exact);
    CHECK(d.diag.lower <= d.diag.upper + 1e-12);
    const double grid = oracle::constrained_regret(c.models(), ref, 0.2, 200);
    CHECK(d.diag.upper >= grid - 2e-2);
    CHECK(d.diag.lower <= grid + 1e-9);
}
