#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmso/adversary.hpp"
#include "dmso/dec.hpp"
#include "dmso/e2d.hpp"
#include "dmso/io.hpp"
#include "dmso/table.hpp"
#include "dmso/verify.hpp"

using namespace dmso;

namespace {

struct Global {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    std::string ct = "proof";
};

void emit(const Table& t, const Global& g) {
    const TableFormat f = parse_format(g.format);
    if (g.out.empty())
        std::cout << t.render(f);
    else
        t.write(g.out, f);
}

std::string support_string(const Dist& p) {
    std::ostringstream os;
    bool first = true;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) {
            os << (first ? "" : " ") << i << ':' << format_double(p(i));
            first = false;
        }
    return os.str();
}

std::string index_list(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

// "eps=a:b:n" or "gamma=a:b:n"; log-spaced.
std::pair<std::string, std::vector<double>> parse_profile(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("profile spec must be eps=a:b:n or gamma=a:b:n");
    const std::string key = spec.substr(0, eq);
    double a, b;
    int n;
    char c1, c2;
    std::istringstream is(spec.substr(eq + 1));
    if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
        throw std::invalid_argument("malformed profile range: " + spec);
    if (key != "eps" && key != "gamma") throw std::invalid_argument("profile key must be eps or gamma");
    return {key, log_grid(a, b, n)};
}

CtConvention parse_ct(const std::string& s) {
    if (s == "proof") return CtConvention::proof;
    if (s == "statement") return CtConvention::statement;
    throw std::invalid_argument("unknown C(T) convention: " + s);
}

std::vector<double> quantiles(std::vector<double> v, const std::vector<double>& qs) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double q : qs) {
        const double pos = q * (v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        out.push_back(v[lo] + (pos - lo) * (v[hi] - v[lo]));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision-estimation coefficients and E2D+ on finite model classes"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--seed", g.seed, "root seed");
    app.add_option("--out", g.out, "output file (stdout when omitted)");
    app.add_option("--format", g.format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
    app.add_option("--ct-convention", g.ct, "statement or proof")->check(CLI::IsMember({"statement", "proof"}));

    // dec
    auto* dec = app.add_subcommand("dec", "compute a DEC value or profile");
    std::string instance, variant = "constrained-regret", ref_kind = "given", ref_file, profile;
    std::optional<double> eps, gamma;
    std::size_t ref_index = 0;
    int hull_res = 8;
    bool include_ref = false;
    dec->add_option("--instance", instance, "class file")->required();
    dec->add_option("--variant", variant, "DEC variant");
    dec->add_option("--eps", eps, "radius for constrained variants");
    dec->add_option("--gamma", gamma, "scale for offset variants");
    dec->add_option("--profile", profile, "eps=a:b:n or gamma=a:b:n");
    dec->add_option("--ref", ref_kind, "given, proper or hull")->check(CLI::IsMember({"given", "proper", "hull"}));
    dec->add_option("--ref-file", ref_file, "reference model file (first model used)");
    dec->add_option("--ref-index", ref_index, "class member used as reference");
    dec->add_option("--hull-res", hull_res, "hull grid resolution");
    dec->add_flag("--include-ref", include_ref, "add the reference to the adversaries");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run algorithms over seeds");
    std::string algorithm = "pac";
    long T = 1000;
    double delta = 0.1, C1 = 128.0, est_c = 1.0;
    int seeds = 1;
    std::size_t true_index = 0;
    sim->add_option("--instance", instance, "class file")->required();
    sim->add_option("--algorithm", algorithm, "pac, regret, ucb, thompson or uniform")
        ->check(CLI::IsMember({"pac", "regret", "ucb", "thompson", "uniform"}));
    sim->add_option("-T,--horizon", T, "rounds");
    sim->add_option("--delta", delta, "failure probability");
    sim->add_option("--seeds", seeds, "number of replicates");
    sim->add_option("--true-index", true_index, "index of the true model");
    sim->add_option("--C1", C1, "regret radius constant");
    sim->add_option("--est-constant", est_c, "constant in the estimation bound");

    // verify
    auto* ver = app.add_subcommand("verify", "run the inequality suites");
    std::vector<std::string> suite_names;
    bool list = false;
    int instances = 50;
    ver->add_option("--suite", suite_names, "suite name (repeatable; all when omitted)");
    ver->add_flag("--list", list, "print the registered suites");
    ver->add_option("--instances", instances, "random instances per suite");

    // adversary
    auto* adv = app.add_subcommand("adversary", "hard-pair construction against a PAC algorithm");
    std::string adv_alg = "constant";
    int arm = 0, mc_runs = 10000;
    std::optional<double> adv_eps;
    adv->add_option("--instance", instance, "class file")->required();
    adv->add_option("--algorithm", adv_alg, "constant or e2d-pac")->check(CLI::IsMember({"constant", "e2d-pac"}));
    adv->add_option("--arm", arm, "decision played by the constant algorithm");
    adv->add_option("-T,--horizon", T, "rounds");
    adv->add_option("--delta", delta, "E2D+ failure probability");
    adv->add_option("--ref-file", ref_file, "reference model file (flat reward 1/2 when omitted)");
    adv->add_option("--eps", adv_eps, "radius (default 1/(10 sqrt(C(T) T)))");
    adv->add_option("--mc-runs", mc_runs, "Monte Carlo transcripts");

    // gen
    auto* gen = app.add_subcommand("gen", "write a generated class");
    std::string kind = "mab";
    double gap = 0.25, alpha = 0.5, beta = 0.25;
    int arms = 3, decisions = 3, models = 3, obs = 0;
    gen->add_option("--kind", kind, "mab, flat, revealing, union or random")
        ->check(CLI::IsMember({"mab", "flat", "revealing", "union", "random"}));
    gen->add_option("--gap", gap);
    gen->add_option("--arms", arms);
    gen->add_option("--alpha", alpha);
    gen->add_option("--beta", beta);
    gen->add_option("--decisions", decisions);
    gen->add_option("--models", models);
    gen->add_option("--obs", obs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*dec) {
            const ModelClass cls = load_class(instance);
            const Variant v = parse_variant(variant);
            DecOptions opt;
            HullGrid hull;
            hull.resolution = hull_res;
            hull.seed = g.seed;
            RefSpec spec;
            if (ref_kind == "hull") {
                spec.kind = RefSpec::Kind::hull_sup;
                spec.hull = hull;
            } else if (ref_kind == "proper") {
                spec.kind = RefSpec::Kind::proper_sup;
            } else {
                spec.kind = RefSpec::Kind::given;
                if (!ref_file.empty()) {
                    spec.model = load_class(ref_file)[0];
                } else {
                    if (ref_index >= cls.size()) throw std::invalid_argument("--ref-index out of range");
                    spec.model = cls[ref_index];
                }
            }
            std::vector<double> grid;
            if (!profile.empty()) {
                auto [key, values] = parse_profile(profile);
                if ((key == "gamma") != is_offset(v)) throw std::invalid_argument("profile key does not match variant");
                grid = values;
            } else {
                const std::optional<double> s = is_offset(v) ? gamma : eps;
                if (!s) throw std::invalid_argument(is_offset(v) ? "--gamma is required" : "--eps is required");
                grid = {*s};
            }
            const DecProfile prof = dec_profile(cls, spec, grid, v, include_ref, opt);
            Table t({"variant", "scale", "value", "lower", "upper", "certified", "exact", "witness_p", "witness_q",
                     "active_set"});
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const DecValue& d = prof.values[i];
                t.add({variant_name(v), format_double(grid[i]), format_double(d.value), format_double(d.diag.lower),
                       format_double(d.diag.upper), d.diag.certified ? "1" : "0", d.diag.exact ? "1" : "0",
                       support_string(d.witness_p), d.witness_q ? support_string(*d.witness_q) : "",
                       index_list(d.active_set)});
            }
            emit(t, g);
            if (!prof.monotone)
                std::cerr << "warning: profile not monotone, worst violation " << prof.worst_violation << '\n';
            return 0;
        }
        if (*sim) {
            const ModelClass cls = load_class(instance);
            if (seeds < 1) throw std::invalid_argument("--seeds must be positive");
            Table t({"algorithm", "T", "delta", "seed", "value", "eps"});
            std::vector<double> values;
            for (int k = 0; k < seeds; ++k) {
                const std::uint64_t s = g.seed + static_cast<std::uint64_t>(k);
                double value = 0.0, radius = 0.0;
                if (algorithm == "pac") {
                    PacConfig cfg;
                    cfg.T = T;
                    cfg.delta = delta;
                    cfg.est_constant = est_c;
                    cfg.keep_transcript = false;
                    const PacRunResult r = run_pac(cls, true_index, cfg, s);
                    value = r.risk;
                    radius = r.diag.eps_bar;
                } else if (algorithm == "regret") {
                    RegretConfig cfg;
                    cfg.T = T;
                    cfg.delta = delta;
                    cfg.C1 = C1;
                    cfg.est_constant = est_c;
                    cfg.keep_transcript = false;
                    const RegretRunResult r = run_regret(cls, true_index, cfg, s);
                    value = r.regret;
                    radius = r.epochs.empty() ? 0.0 : r.epochs.back().eps;
                } else {
                    value = run_baseline(cls, true_index, T, parse_baseline(algorithm), s).regret;
                }
                values.push_back(value);
                t.add({algorithm, std::to_string(T), format_double(delta), std::to_string(s), format_double(value),
                       format_double(radius)});
            }
            emit(t, g);
            double mean = 0.0;
            for (double x : values) mean += x;
            mean /= values.size();
            const auto q = quantiles(values, {0.1, 0.5, 0.9});
            Table agg({"algorithm", "T", "seeds", "mean", "q10", "q50", "q90"});
            agg.add({algorithm, std::to_string(T), std::to_string(seeds), format_double(mean), format_double(q[0]),
                     format_double(q[1]), format_double(q[2])});
            if (g.out.empty())
                std::cerr << agg.render(parse_format(g.format));
            else
                agg.write(g.out + ".aggregate", parse_format(g.format));
            return 0;
        }
        if (*ver) {
            if (list) {
                Table t({"suite", "statement"});
                for (const auto& s : suites()) t.add({s.name, s.statement});
                emit(t, g);
                return 0;
            }
            VerifyOptions opt;
            opt.seed = g.seed;
            opt.instances = instances;
            const VerificationReport rep = run_verification(suite_names, opt);
            Table t({"suite", "statement", "seed", "detail", "lhs", "rhs", "margin", "pass"});
            for (const auto& r : rep.records)
                t.add({r.suite, r.statement, std::to_string(r.seed), r.detail, format_double(r.lhs),
                       format_double(r.rhs), format_double(r.margin), r.pass ? "1" : "0"});
            emit(t, g);
            std::cerr << "passed " << rep.passed() << " failed " << rep.failed() << '\n';
            return rep.failed() == 0 ? 0 : 1;
        }
        if (*adv) {
            const ModelClass cls = load_class(instance);
            const FiniteModel ref = ref_file.empty() ? make_flat_reference(cls.decisions()) : load_class(ref_file)[0];
            AlgorithmRunner runner;
            if (adv_alg == "constant") {
                if (arm < 0 || arm >= cls.decisions()) throw std::invalid_argument("--arm out of range");
                runner = [arm](const FiniteModel& env, std::uint64_t) {
                    Dist p = Dist::Zero(env.decisions());
                    p(arm) = 1.0;
                    return RunBehavior{p, p};
                };
            } else {
                PacConfig cfg;
                cfg.T = T;
                cfg.delta = delta;
                cfg.keep_transcript = false;
                runner = [&cls, cfg](const FiniteModel& env, std::uint64_t s) {
                    const PacRunResult r = run_pac_env(cls, env, cfg, s);
                    return RunBehavior{r.p_hat, r.q_mean};
                };
            }
            AdversaryConfig cfg;
            cfg.T = T;
            cfg.ct = parse_ct(g.ct);
            cfg.eps = adv_eps;
            cfg.mc_runs = mc_runs;
            cfg.seed = g.seed;
            const AdversaryReport rep = adversary_hard_pair_pac(cls, runner, ref, cfg);
            Table t({"feasible", "message", "eps", "ct", "delta_dec", "m1", "m2", "mass_outside", "m2_fallback",
                     "risk_m1", "se_m1", "risk_m2", "se_m2", "max_risk", "tv_proxy"});
            t.add({rep.feasible ? "1" : "0", rep.message, format_double(rep.eps), format_double(rep.ct),
                   format_double(rep.delta_dec), std::to_string(rep.m1), std::to_string(rep.m2),
                   format_double(rep.mass_outside), rep.m2_fallback ? "1" : "0", format_double(rep.risk_m1),
                   format_double(rep.se_m1), format_double(rep.risk_m2), format_double(rep.se_m2),
                   format_double(rep.max_risk()), format_double(rep.tv_proxy)});
            emit(t, g);
            return 0;
        }
        if (*gen) {
            ModelClass cls;
            if (kind == "mab")
                cls = make_mab_class(gap, arms);
            else if (kind == "flat")
                cls = ModelClass({make_flat_reference(arms)}, {"flat"});
            else if (kind == "revealing")
                cls = make_revealing_class(alpha, beta, arms);
            else if (kind == "union")
                cls = make_union_class(alpha, arms);
            else
                cls = make_random_class(g.seed, decisions, models, {0.0, 1.0}, obs);
            const std::string text = serialize_class(cls);
            if (g.out.empty())
                std::cout << text;
            else
                write_atomic(g.out, text);
            return 0;
        }
    } catch (const std::exception& e) {
        nlohmann::json err = {{"error", e.what()}};
        std::cerr << err.dump() << '\n';
        return 2;
    }
    return 0;
}
