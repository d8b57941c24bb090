#include "dmso/e2d.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "dmso/divergence.hpp"
#include "dmso/estimate.hpp"

namespace dmso {

Outcome protocol_step(const FiniteModel& model, const Dist& dist, Rng& rng) {
    if (dist.size() != model.decisions()) throw std::invalid_argument("protocol_step: dimension mismatch");
    Outcome o;
    o.decision = static_cast<int>(rng.categorical(dist));
    const int x = static_cast<int>(rng.categorical(model.kernel().row(o.decision)));
    o.reward_index = x / model.alphabet();
    o.obs = x % model.alphabet();
    o.reward = model.reward_support()(o.reward_index);
    return o;
}

double Transcript::total_regret() const {
    double s = 0.0;
    for (const auto& r : rounds) s += r.expected_regret;
    return s;
}

PacSolver default_pac_solver(const DecOptions& opt) {
    return [opt](const ModelClass& cls, const FiniteModel& est, double eps) {
        DecValue d = solve_constrained(make_game(cls, est, false), eps, Variant::constrained_pac, opt);
        return std::make_pair(d.witness_p, *d.witness_q);
    };
}

RegretSolver default_regret_solver(const DecOptions& opt) {
    return [opt](const ModelClass& cls, const FiniteModel& est, double eps) {
        return solve_constrained(make_game(cls, est, true), eps, Variant::constrained_regret, opt).witness_p;
    };
}

namespace {

// Stream tags.
enum : std::uint64_t { kExplore = 1, kExploit = 2, kChoice = 3, kRefine = 4, kPlay = 5, kEpochBase = 100 };

class Recorder {
public:
    Recorder(const FiniteModel& env, bool keep) : gaps_(env.gaps()), keep_(keep) {}

    double record(const Dist& dist, const Outcome& o) {
        const double r = gaps_.dot(dist);
        regret_ += r;
        if (keep_) transcript_.rounds.push_back({dist, o, r});
        return r;
    }
    double regret() const { return regret_; }
    Transcript take() { return std::move(transcript_); }

private:
    Vector gaps_;
    bool keep_;
    double regret_ = 0.0;
    Transcript transcript_;
};

int ceil_log2(double x) { return static_cast<int>(std::ceil(std::log2(x) - 1e-12)); }

}  // namespace

PacParameters pac_parameters(std::size_t models, long T, double delta, double est_constant) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("run_pac: delta outside (0,1)");
    PacParameters p;
    p.L = std::max(1, ceil_log2(2.0 / delta));
    if (T < 2L * (p.L + 1)) throw std::invalid_argument("run_pac: T too small for the exploration/exploitation split");
    p.J = T / (p.L + 1);
    p.est_bar = est_constant * std::log(static_cast<double>(models) * 4.0 * p.L / delta);
    p.eps_bar = 8.0 * std::sqrt(static_cast<double>(p.L) / static_cast<double>(T) * p.est_bar);
    return p;
}

PacRunResult run_pac(const ModelClass& cls, std::size_t true_index, const PacConfig& cfg, std::uint64_t seed) {
    if (true_index >= cls.size()) throw std::invalid_argument("run_pac: true model is not in the class");
    return run_pac_env(cls, cls[true_index], cfg, seed);
}

PacRunResult run_pac_env(const ModelClass& cls, const FiniteModel& env, const PacConfig& cfg, std::uint64_t seed) {
    if (!env.same_spaces(cls[0])) throw std::invalid_argument("run_pac: environment spaces differ from the class");
    const PacParameters par = pac_parameters(cls.size(), cfg.T, cfg.delta, cfg.est_constant);
    const PacSolver solver = cfg.solver ? cfg.solver : default_pac_solver();
    const Rng root(seed);
    Recorder rec(env, cfg.keep_transcript);

    PacRunResult res;
    res.diag.L = par.L;
    res.diag.J = par.J;
    res.diag.est_bar = par.est_bar;
    res.diag.eps_bar = par.eps_bar;

    std::vector<Dist> ps, qs;
    std::vector<Vector> est_weights;
    ExpWeightsOracle oracle(cls);
    const Rng explore = root.split(kExplore);
    res.q_mean = Dist::Zero(cls.decisions());
    for (long t = 0; t < par.J; ++t) {
        est_weights.push_back(oracle.weights());
        auto [p, q] = solver(cls, mixture_materialize({&cls, est_weights.back()}), par.eps_bar);
        Rng r = explore.split(static_cast<std::uint64_t>(t));
        const Outcome o = protocol_step(env, q, r);
        oracle.update(o.decision, o.reward_index, o.obs);
        rec.record(q, o);
        res.q_mean += q;
        ps.push_back(std::move(p));
        qs.push_back(std::move(q));
    }
    res.q_mean /= static_cast<double>(par.J);

    Rng choice = root.split(kChoice);
    const Rng exploit = root.split(kExploit);
    for (int l = 0; l < par.L; ++l) {
        const long tl = static_cast<long>(choice.below(static_cast<std::size_t>(par.J)));
        res.diag.t_ell.push_back(tl);
        ExpWeightsOracle fresh(cls);
        Vector acc = Vector::Zero(static_cast<Eigen::Index>(cls.size()));
        const Rng stream = exploit.split(static_cast<std::uint64_t>(l));
        for (long j = 0; j < par.J; ++j) {
            acc += fresh.weights();
            Rng r = stream.split(static_cast<std::uint64_t>(j));
            const Outcome o = protocol_step(env, qs[tl], r);
            fresh.update(o.decision, o.reward_index, o.obs);
            rec.record(qs[tl], o);
        }
        const FiniteModel tilde = mixture_materialize({&cls, acc / static_cast<double>(par.J)});
        const FiniteModel hat = mixture_materialize({&cls, est_weights[tl]});
        res.diag.test_stats.push_back(expected_hellinger_sq(hat, tilde, qs[tl]));
    }
    int best = 0;
    for (int l = 1; l < par.L; ++l)
        if (res.diag.test_stats[l] < res.diag.test_stats[best]) best = l;
    res.ell_hat = best;
    const long s = res.diag.t_ell[best];
    res.p_hat = ps[s];
    res.risk = env.gaps().dot(res.p_hat);
    res.diag.selected_true_error =
        expected_hellinger_sq(env, mixture_materialize({&cls, est_weights[s]}), qs[s]);
    res.transcript = rec.take();
    return res;
}

EpochSchedule regret_schedule(long T, double delta) {
    if (T < 2) throw std::invalid_argument("run_regret: T < 2");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("run_regret: delta outside (0,1)");
    EpochSchedule s;
    s.N = ceil_log2(static_cast<double>(T));
    s.L = std::max(1, ceil_log2(1.0 / delta));
    long left = T;
    for (int i = 1; i <= s.N; ++i) {
        const long size = (1L << i) / 4 + ((1L << i) % 4 != 0 ? 1 : 0);
        const long e = std::min(size, left);
        left -= e;
        const long r = std::min(size, left);
        left -= r;
        s.explore.push_back(e);
        s.refine.push_back(r);
    }
    s.explore.back() += left;
    for (int i = 0; i < s.N; ++i)
        if (s.explore[i] == 0 || s.refine[i] == 0)
            throw std::invalid_argument("run_regret: T too small for nonempty epoch blocks");
    return s;
}

RegretRunResult run_regret(const ModelClass& cls, std::size_t true_index, const RegretConfig& cfg,
                           std::uint64_t seed) {
    if (true_index >= cls.size()) throw std::invalid_argument("run_regret: true model is not in the class");
    const FiniteModel& env = cls[true_index];
    const EpochSchedule sched = regret_schedule(cfg.T, cfg.delta);
    const RegretSolver solver = cfg.solver ? cfg.solver : default_regret_solver();
    const double est = est_bound(cls.size(), cfg.delta, cfg.est_constant);
    const double eps_n2 = cfg.C1 * est * sched.L / static_cast<double>(cfg.T);
    const Rng root(seed);
    Recorder rec(env, cfg.keep_transcript);

    RegretRunResult res;
    res.algorithm = "e2d-regret";
    std::vector<std::size_t> active(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) active[i] = i;

    for (int i = 1; i <= sched.N; ++i) {
        EpochRecord ep;
        ep.epoch = i;
        ep.explore_rounds = sched.explore[i - 1];
        ep.refine_rounds = sched.refine[i - 1];
        ep.eps = std::sqrt(std::ldexp(eps_n2, sched.N - i));
        ep.class_size = active.size();
        ep.truth_in_class = std::find(active.begin(), active.end(), true_index) != active.end();
        const double eps2 = ep.eps * ep.eps;
        const Rng erng = root.split(kEpochBase + static_cast<std::uint64_t>(i));

        // Exploration.
        ExpWeightsOracle oracle(cls, active);
        std::vector<Dist> ps;
        std::vector<Vector> hats;
        const Rng explore = erng.split(kExplore);
        const double before = rec.regret();
        for (long k = 0; k < ep.explore_rounds; ++k) {
            hats.push_back(oracle.weights());
            Dist p = solver(cls, mixture_materialize({&cls, hats.back()}), ep.eps);
            Rng r = explore.split(static_cast<std::uint64_t>(k));
            const Outcome o = protocol_step(env, p, r);
            oracle.update(o.decision, o.reward_index, o.obs);
            rec.record(p, o);
            ps.push_back(std::move(p));
        }
        ep.explore_regret = rec.regret() - before;

        // Refinement.
        const double before_refine = rec.regret();
        const Rng play = erng.split(kPlay);
        long used = 0;
        Dist p_final = ps.back();
        if (sched.L > ep.refine_rounds) {
            ep.refined = false;
        } else {
            ep.refined = true;
            ep.J = std::max(1L, ep.refine_rounds / sched.L);
            Rng choice = erng.split(kChoice);
            std::vector<long> S;
            for (int l = 0; l < sched.L; ++l)
                S.push_back(static_cast<long>(choice.below(static_cast<std::size_t>(ep.explore_rounds))));
            const Rng refine = erng.split(kRefine);
            int s_tmp = -1;
            std::vector<Vector> averages(S.size());
            for (std::size_t l = 0; l < S.size(); ++l) {
                const long s = S[l];
                const FiniteModel hat = mixture_materialize({&cls, hats[s]});
                const Vector hat_rows_weight = ps[s];
                ExpWeightsOracle inner(cls, active);
                Vector acc = Vector::Zero(static_cast<Eigen::Index>(cls.size()));
                double sum = 0.0;
                long j_used = 0;
                const Rng stream = refine.split(l);
                for (long j = 1; j <= ep.J; ++j) {
                    const Vector w = inner.weights();
                    acc += w;
                    sum += expected_hellinger_sq(hat, mixture_materialize({&cls, w}), hat_rows_weight);
                    Rng r = stream.split(static_cast<std::uint64_t>(j));
                    const Outcome o = protocol_step(env, ps[s], r);
                    inner.update(o.decision, o.reward_index, o.obs);
                    rec.record(ps[s], o);
                    ++used;
                    j_used = j;
                    if (sum > ep.J * eps2 / 4.0) break;
                    if (j == ep.J) s_tmp = static_cast<int>(l);
                }
                averages[l] = acc / static_cast<double>(j_used);
                if (cfg.break_on_success && s_tmp >= 0) break;
            }
            const int chosen = s_tmp >= 0 ? s_tmp : 0;
            ep.s_from_success = s_tmp >= 0;
            ep.s_chosen = S[chosen];
            p_final = ps[S[chosen]];
            const FiniteModel m_hat = mixture_materialize({&cls, averages[chosen]});

            // Confidence set for the next epoch.
            const double radius = est / static_cast<double>(ep.J);
            std::vector<std::size_t> next;
            Vector div(static_cast<Eigen::Index>(cls.size()));
            for (std::size_t k = 0; k < cls.size(); ++k) {
                div(k) = expected_hellinger_sq(cls[k], m_hat, p_final);
                if (div(k) <= radius) next.push_back(k);
            }
            if (next.empty()) {
                const double lo = div.minCoeff();
                for (std::size_t k = 0; k < cls.size(); ++k)
                    if (div(k) <= lo + 1e-12) next.push_back(k);
            }
            active = next;
        }
        for (long k = used; k < ep.refine_rounds; ++k) {
            Rng r = play.split(static_cast<std::uint64_t>(k));
            rec.record(p_final, protocol_step(env, p_final, r));
        }
        ep.refine_regret = rec.regret() - before_refine;
        res.epochs.push_back(ep);
    }
    res.regret = rec.regret();
    res.transcript = rec.take();
    return res;
}

Baseline parse_baseline(const std::string& name) {
    if (name == "ucb") return Baseline::ucb;
    if (name == "thompson") return Baseline::thompson;
    if (name == "uniform") return Baseline::uniform;
    throw std::invalid_argument("unknown baseline policy: " + name);
}

RegretRunResult run_baseline(const ModelClass& cls, std::size_t true_index, long T, Baseline policy,
                             std::uint64_t seed) {
    if (true_index >= cls.size()) throw std::invalid_argument("run_baseline: true model is not in the class");
    if (T < 1) throw std::invalid_argument("run_baseline: T < 1");
    if (policy == Baseline::ucb && cls.obs_count() > 1)
        throw std::invalid_argument("run_baseline: ucb needs a bandit class without observations");
    const FiniteModel& env = cls[true_index];
    const Eigen::Index n = env.decisions();
    const Rng stream = Rng(seed).split(kPlay);
    Recorder rec(env, true);
    RegretRunResult res;

    Vector counts = Vector::Zero(n), sums = Vector::Zero(n);
    std::optional<ExpWeightsOracle> posterior;
    if (policy == Baseline::thompson) posterior.emplace(cls);
    for (long t = 0; t < T; ++t) {
        Dist dist = Dist::Zero(n);
        switch (policy) {
            case Baseline::uniform:
                res.algorithm = "uniform";
                dist.setConstant(1.0 / static_cast<double>(n));
                break;
            case Baseline::ucb: {
                res.algorithm = "ucb";
                Eigen::Index pick = -1;
                for (Eigen::Index a = 0; a < n && pick < 0; ++a)
                    if (counts(a) == 0.0) pick = a;
                if (pick < 0) {
                    double best = -1.0;
                    for (Eigen::Index a = 0; a < n; ++a) {
                        const double ucb = sums(a) / counts(a) + std::sqrt(2.0 * std::log(static_cast<double>(t)) / counts(a));
                        if (ucb > best) {
                            best = ucb;
                            pick = a;
                        }
                    }
                }
                dist(pick) = 1.0;
                break;
            }
            case Baseline::thompson: {
                res.algorithm = "thompson";
                const Vector w = posterior->weights();
                for (std::size_t k = 0; k < cls.size(); ++k) dist(cls[k].best_index()) += w(k);
                dist /= dist.sum();
                break;
            }
        }
        Rng r = stream.split(static_cast<std::uint64_t>(t));
        const Outcome o = protocol_step(env, dist, r);
        counts(o.decision) += 1.0;
        sums(o.decision) += o.reward;
        if (posterior) posterior->update(o.decision, o.reward_index, o.obs);
        rec.record(dist, o);
    }
    res.regret = rec.regret();
    res.transcript = rec.take();
    return res;
}

}  // namespace dmso
