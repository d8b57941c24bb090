// Acceptance checks. Prints one PASS/FAIL line per criterion; tolerances and
// bands are pinned below. Usage: acceptance [--known-red 6,...] [criterion...]
// Criteria listed after --known-red still print FAIL but do not fail the exit
// code; any other failure does.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dmso/adversary.hpp"
#include "dmso/dec.hpp"
#include "dmso/e2d.hpp"
#include "dmso/estimate.hpp"
#include "dmso/io.hpp"
#include "dmso/verify.hpp"

using namespace dmso;

namespace {

// Pinned tolerances and bands.
constexpr double kMarginTol = 1e-7;          // 1, 2
constexpr double kSuiteBudgetSec = 300.0;    // 1
constexpr double kMabBandLo = 0.15;          // 3
constexpr double kMabBandHi = 1.5;           // 3
constexpr double kRevealC = 30.0;            // 4
constexpr double kPacRiskTol = 1e-7;         // 5
constexpr double kPacFreq = 0.9;             // 5
constexpr double kPacBudgetSec = 600.0;      // 5
constexpr double kGrowthCap = 2.5;           // 6
constexpr double kRegretConst = 1.0;         // 6, frozen after the first run
constexpr double kRegretBudgetSec = 1200.0;  // 6
constexpr double kEstQuantile = 0.9;         // 7
constexpr double kConstArmRisk = 0.15;       // 8
constexpr double kZ95 = 1.6448536269514722;  // 8, one-sided 95%
constexpr double kAdversaryEps = 0.4;        // 8, see below

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Verdict inequality_suites() {
    const auto t0 = Clock::now();
    VerifyOptions opt;
    opt.instances = 50;
    opt.max_models = 8;
    const VerificationReport rep = run_verification({}, opt);
    const double sec = seconds_since(t0);
    const bool ok = rep.failed() == 0 && rep.worst_margin() >= -kMarginTol && sec <= kSuiteBudgetSec;
    return {ok, fmt("%zu suites, %d records, %d failed, worst margin %.3g, %.1fs", suites().size(),
                    rep.passed() + rep.failed(), rep.failed(), rep.worst_margin(), sec)};
}

Verdict minimax_swap() {
    VerifyOptions opt;
    opt.instances = 100;
    opt.seed = 2;
    const VerificationReport rep = run_verification({"minimax-swap"}, opt);
    double worst = 0.0;
    for (const auto& r : rep.records) worst = std::max(worst, r.lhs);
    return {worst <= kMarginTol && rep.records.size() == 800,
            fmt("%zu comparisons, max |primal - dual| %.3g", rep.records.size(), worst)};
}

Verdict mab_scaling() {
    double lo = 1e9, hi = 0.0;
    for (int arms : {2, 3, 4})
        for (double eps : {0.02, 0.05, 0.1}) {
            const double scale = eps * std::sqrt(static_cast<double>(arms));
            const ModelClass c = make_mab_class(scale, arms);
            HullGrid grid;
            grid.extra_refs = {make_flat_reference(arms)};
            const HullResult h = hull_sup_dec(c, eps, Variant::constrained_regret, true, grid);
            lo = std::min(lo, h.lower_max / scale);
            hi = std::max(hi, h.upper_max / scale);
        }
    return {lo >= kMabBandLo && hi <= kMabBandHi,
            fmt("ratio to eps sqrt A in [%.4f, %.4f], band [%.2f, %.2f]", lo, hi, kMabBandLo, kMabBandHi)};
}

Verdict revealing_bounds() {
    const double beta = 0.25;
    const int arms = 4;
    const ModelClass up = make_revealing_class(0.5, beta, arms);
    HullGrid grid;
    grid.resolution = 4;
    double worst_up = 0.0;
    for (double eps : log_grid(0.02, 0.2, 10)) {
        const HullResult h = hull_sup_dec(up, eps, Variant::constrained_regret, true, grid);
        worst_up = std::max(worst_up, h.upper_max / (kRevealC * eps * eps / beta));
    }
    const double alpha = 0.2;
    const ModelClass low = make_revealing_class(alpha, beta, arms);
    const FiniteModel tilde = make_revealing_tilde(alpha, beta, arms);
    double worst_low = 1e9;
    for (double g : {1.0, 2.0, 4.0, 8.0}) {
        const double v = offset_dec(low, tilde, g, Variant::offset_regret).value;
        const double bound = alpha / (2.0 + 8.0 * g * beta) - 4.0 * g / arms;
        worst_low = std::min(worst_low, v - bound);
    }
    return {worst_up <= 1.0 && worst_low >= -kMarginTol,
            fmt("max c-DEC / (30 eps^2/beta) = %.4f; min o-DEC - lower bound = %.4f", worst_up, worst_low)};
}

Verdict pac_runs() {
    const auto t0 = Clock::now();
    const ModelClass c = make_mab_class(0.25, 5);
    PacConfig cfg;
    cfg.T = 4000;
    cfg.delta = 0.1;
    cfg.keep_transcript = false;
    const PacParameters par = pac_parameters(c.size(), cfg.T, cfg.delta);
    const double dec = hull_sup_dec(c, par.eps_bar, Variant::constrained_pac, false, HullGrid{}).upper_max;
    const int seeds = 200;
    int good = 0;
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const PacRunResult r = run_pac(c, static_cast<std::size_t>(s % 5), cfg, static_cast<std::uint64_t>(s));
        mean += r.risk / seeds;
        if (r.risk <= dec + kPacRiskTol) ++good;
    }
    const double freq = static_cast<double>(good) / seeds;
    const double sec = seconds_since(t0);
    return {freq >= kPacFreq && sec <= kPacBudgetSec,
            fmt("eps_bar %.4f, hull-sup pac DEC %.4f, mean risk %.4f, frequency %.3f, %.1fs", par.eps_bar, dec, mean,
                freq, sec)};
}

struct RegretSweep {
    std::vector<double> means;
    bool under = true;
    std::string text;
};

RegretSweep regret_sweep(double C1) {
    const ModelClass c = make_mab_class(0.3, 3);
    RegretConfig cfg;
    cfg.delta = 0.1;
    cfg.C1 = C1;
    cfg.keep_transcript = false;
    const int seeds = 100;
    RegretSweep out;
    for (long T : {1L << 10, 1L << 12, 1L << 14}) {
        cfg.T = T;
        double mean = 0.0;
        for (int s = 0; s < seeds; ++s)
            mean += run_regret(c, static_cast<std::size_t>(s % 3), cfg, static_cast<std::uint64_t>(s)).regret / seeds;
        const double bound =
            kRegretConst * std::sqrt(3.0 * static_cast<double>(T) * std::log(3.0) * std::log(1.0 / cfg.delta));
        out.under = out.under && mean <= bound;
        out.text += fmt("T=%ld mean %.1f (bound %.1f) ", T, mean, bound);
        out.means.push_back(mean);
    }
    out.text += fmt("ratios %.3f %.3f", out.means[1] / out.means[0], out.means[2] / out.means[1]);
    return out;
}

Verdict regret_runs() {
    const auto t0 = Clock::now();
    const RegretSweep main = regret_sweep(RegretConfig{}.C1);
    bool growth = true;
    for (std::size_t k = 1; k < main.means.size(); ++k)
        growth = growth && main.means[k] >= main.means[k - 1] && main.means[k] <= kGrowthCap * main.means[k - 1];
    const double sec = seconds_since(t0);
    // Reported only: the same sweep with C1 = 1, where the radii shrink below the
    // model separation within these horizons.
    const RegretSweep small = regret_sweep(1.0);
    return {growth && main.under && sec <= kRegretBudgetSec,
            fmt("C1=%g: %s, %.1fs | diagnostic C1=1: %s", RegretConfig{}.C1, main.text.c_str(), sec,
                small.text.c_str())};
}

Verdict estimation() {
    std::ostringstream os;
    bool ok = true;
    for (int models : {2, 5}) {
        const ModelClass c = make_mab_class(0.25, models);
        const Dist uniform = Dist::Constant(models, 1.0 / models);
        std::vector<double> est;
        for (int s = 0; s < 500; ++s) {
            Rng r(static_cast<std::uint64_t>(s));
            ExpWeightsOracle o(c);
            const FiniteModel& truth = c[static_cast<std::size_t>(s % models)];
            double total = 0.0;
            for (int t = 0; t < 500; ++t) {
                total += expected_hellinger_sq(truth, o.predict_model(), uniform);
                const dmso::Outcome out = protocol_step(truth, uniform, r);
                o.update(out.decision, out.reward_index, out.obs);
            }
            est.push_back(total);
        }
        std::sort(est.begin(), est.end());
        const double q = est[static_cast<std::size_t>(std::ceil(kEstQuantile * est.size())) - 1];
        const double bound = std::log(static_cast<double>(models)) + std::log(10.0);
        ok = ok && q <= bound;
        os << fmt("%s|M|=%d q90 %.3f <= %.3f", os.tellp() > 0 ? "; " : "", models, q, bound);
    }
    return {ok, os.str()};
}

Verdict adversary() {
    const ModelClass c = make_mab_class(0.3, 3);
    const FiniteModel flat = make_flat_reference(3);

    AdversaryConfig cc;
    cc.T = 50;
    cc.mc_runs = 10;
    const AlgorithmRunner constant = [](const FiniteModel& env, std::uint64_t) {
        const Dist e = Dist::Unit(env.decisions(), 0);
        return RunBehavior{e, e};
    };
    const AdversaryReport a = adversary_hard_pair_pac(c, constant, flat, cc);
    const bool part1 = a.feasible && a.max_risk() >= kConstArmRisk;

    // At the default radius 1/(10 sqrt(C(T) T)) no model of this fixed-gap class
    // stays in both balls and the DEC there is 0, so the check would be vacuous;
    // it runs at a radius where the DEC is positive instead.
    PacConfig pc;
    pc.T = 50;
    pc.keep_transcript = false;
    const AlgorithmRunner e2d = [&](const FiniteModel& env, std::uint64_t seed) {
        const PacRunResult r = run_pac_env(c, env, pc, seed);
        return RunBehavior{r.p_hat, r.q_mean};
    };
    AdversaryConfig ec;
    ec.T = 50;
    ec.mc_runs = 300;
    ec.eps = kAdversaryEps;
    ec.seed = 1;
    const AdversaryReport b = adversary_hard_pair_pac(c, e2d, flat, ec);
    const double threshold = 0.25 * (3.0 * ec.c0 / 20.0) * b.delta_dec;
    // one-sided test on the worse of the two models
    const bool use2 = b.risk_m2 > b.risk_m1;
    const double mean = use2 ? b.risk_m2 : b.risk_m1, se = use2 ? b.se_m2 : b.se_m1;
    const bool part2 = b.feasible && b.delta_dec > 0.0 && mean - kZ95 * se >= threshold;

    AdversaryConfig dc = ec;
    dc.eps.reset();
    dc.mc_runs = 20;
    const AdversaryReport d = adversary_hard_pair_pac(c, e2d, flat, dc);
    return {part1 && part2,
            fmt("constant arm: pair (%zu,%zu) max risk %.3f >= %.2f; e2d T=50 eps %.2f: delta_dec %.4f, "
                "pair (%zu,%zu), risk %.4f - 1.645*%.4f >= %.5f; default eps %.2g: %s",
                a.m1, a.m2, a.max_risk(), kConstArmRisk, b.eps, b.delta_dec, b.m1, b.m2, mean, se, threshold, d.eps,
                d.feasible ? "feasible" : "no close model (dec 0)")};
}

Verdict conventions() {
    std::vector<std::string> bad;
    // empty balls
    const ModelClass c = make_mab_class(0.2, 3);
    const FiniteModel far = make_mab({0.02, 0.02, 0.02});
    for (Variant v : {Variant::constrained_regret, Variant::constrained_pac, Variant::constrained_pac_alt,
                      Variant::constrained_pac_greedy}) {
        const DecValue d = constrained_dec(c, far, 0.05, v, false);
        if (d.value != 0.0 || !d.active_set.empty()) bad.push_back(std::string("empty ball ") + variant_name(v));
    }
    // round trips
    for (std::uint64_t s = 0; s < 20; ++s) {
        const ModelClass r = make_random_class(s, 3, 4, {0.0, 0.25, 1.0}, static_cast<int>(s % 3));
        const std::string text = serialize_class(r);
        const ModelClass back = parse_class(text);
        bool same = serialize_class(back) == text;
        for (std::size_t i = 0; i < r.size() && same; ++i)
            same = std::memcmp(r[i].kernel().data(), back[i].kernel().data(), sizeof(double) * r[i].kernel().size()) ==
                   0;
        if (!same) bad.push_back("round trip " + std::to_string(s));
    }
    // determinism
    PacConfig pc;
    pc.T = 300;
    const auto p1 = run_pac(c, 1, pc, 42), p2 = run_pac(c, 1, pc, 42);
    bool pac_same = p1.p_hat == p2.p_hat && p1.risk == p2.risk && p1.transcript.rounds.size() == p2.transcript.rounds.size();
    for (std::size_t t = 0; pac_same && t < p1.transcript.rounds.size(); ++t)
        pac_same = p1.transcript.rounds[t].outcome.decision == p2.transcript.rounds[t].outcome.decision &&
                   p1.transcript.rounds[t].outcome.obs == p2.transcript.rounds[t].outcome.obs &&
                   p1.transcript.rounds[t].dist == p2.transcript.rounds[t].dist;
    if (!pac_same) bad.push_back("pac determinism");
    RegretConfig rc;
    rc.T = 512;
    if (run_regret(c, 2, rc, 9).regret != run_regret(c, 2, rc, 9).regret) bad.push_back("regret determinism");
    VerifyOptions vo;
    vo.instances = 5;
    const auto v1 = run_verification({"lagrangian"}, vo), v2 = run_verification({"lagrangian"}, vo);
    for (std::size_t i = 0; i < v1.records.size(); ++i)
        if (v1.records[i].lhs != v2.records[i].lhs || v1.records[i].rhs != v2.records[i].rhs) {
            bad.push_back("verify determinism");
            break;
        }
    std::string detail = bad.empty() ? "empty-ball zeros, bit-exact round trips, bit-identical reruns" : "failed:";
    for (const auto& b : bad) detail += " " + b;
    return {bad.empty(), detail};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "inequality suites", inequality_suites}, {2, "minimax swap", minimax_swap},
        {3, "mab scaling", mab_scaling},             {4, "revealing class bounds", revealing_bounds},
        {5, "e2d pac", pac_runs},                    {6, "e2d regret", regret_runs},
        {7, "estimation oracle", estimation},        {8, "adversary", adversary},
        {9, "conventions", conventions},
    };
    std::set<int> pick, known_red;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--known-red") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) known_red.insert(std::stoi(tok));
        } else {
            pick.insert(std::atoi(argv[i]));
        }
    }
    int unexpected = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        Verdict o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %d %s: %s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    !o.pass && known_red.count(c.id) ? " [known red]" : "");
        std::fflush(stdout);
        if (!o.pass && !known_red.count(c.id)) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
