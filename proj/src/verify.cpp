#include "dmso/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dmso/dec.hpp"
#include "dmso/divergence.hpp"
#include "dmso/model.hpp"
#include "dmso/rng.hpp"

namespace dmso {

namespace {

const std::vector<double> kBernoulli = {0.0, 1.0};

struct Instance {
    std::uint64_t seed;
    ModelClass cls;
    FiniteModel ref;     // improper: a random model or a class mixture
    std::size_t member;  // a proper reference index
    Vector nu;           // a random prior over the class
};

// Bernoulli means near 1/2 with independent perturbations per model, and
// observation rows mixed toward a shared base, so that best decisions differ
// while Hellinger balls of moderate radius hold several models.
struct Base {
    Vector means;
    Kernel obs;  // decisions x alphabet
};

FiniteModel close_model(Rng& r, const Base& b, double scale, int obs_count) {
    const Eigen::Index n = b.means.size(), alphabet = b.obs.cols();
    Kernel k(n, 2 * alphabet);
    for (Eigen::Index d = 0; d < n; ++d) {
        const double mean = std::clamp(b.means(d) + scale * (2.0 * r.uniform() - 1.0), 0.02, 0.98);
        const double s = scale * r.uniform();
        const Vector o = (1.0 - s) * b.obs.row(d).transpose() + s * r.dirichlet_flat(alphabet);
        k.row(d).head(alphabet) = (1.0 - mean) * o.transpose();
        k.row(d).tail(alphabet) = mean * o.transpose();
    }
    return FiniteModel(Vector{{0.0, 1.0}}, obs_count, k);
}

Instance make_instance(std::uint64_t seed, const VerifyOptions& opt) {
    Rng r(seed);
    const int n = 2 + static_cast<int>(r.below(static_cast<std::size_t>(std::max(1, opt.max_decisions - 1))));
    const int m = 2 + static_cast<int>(r.below(static_cast<std::size_t>(std::max(1, opt.max_models - 1))));
    const int obs = r.below(2) ? 2 : 0;
    const int alphabet = std::max(obs, 1);
    Base b{Vector(n), Kernel(n, alphabet)};
    for (int d = 0; d < n; ++d) {
        b.means(d) = 0.5 + 0.1 * (2.0 * r.uniform() - 1.0);
        b.obs.row(d) = r.dirichlet_flat(alphabet).transpose();
    }
    std::vector<FiniteModel> models;
    for (int i = 0; i < m; ++i) models.push_back(close_model(r, b, 0.2, obs));
    Instance in{seed, ModelClass(std::move(models)), {}, 0, r.dirichlet_flat(m)};
    in.ref = seed % 2 ? close_model(r, b, 0.1, obs) : mix_models(in.cls.models(), in.nu);
    in.member = r.below(static_cast<std::size_t>(m));
    return in;
}

std::uint64_t instance_seed(const VerifyOptions& opt, const std::string& suite, int k) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return Rng(opt.seed).split(h).split(static_cast<std::uint64_t>(k)).next();
}

class Sink {
public:
    Sink(const Suite* suite, std::vector<InequalityRecord>& out) : suite_(suite), out_(out) {}
    void add(std::uint64_t seed, const std::string& detail, double lhs, double rhs) {
        InequalityRecord r;
        r.suite = suite_->name;
        r.statement = suite_->statement;
        r.seed = seed;
        r.detail = detail;
        r.lhs = lhs;
        r.rhs = rhs;
        r.margin = rhs - lhs;
        r.pass = r.margin >= -kVerifyTolerance;
        out_.push_back(std::move(r));
    }

private:
    const Suite* suite_;
    std::vector<InequalityRecord>& out_;
};

std::string fmt(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : " ") << k << '=' << v;
        first = false;
    }
    return os.str();
}

// Certified bounds of a DEC value.
double lo(const DecValue& d) { return d.diag.lower; }
double hi(const DecValue& d) { return d.diag.upper; }

const std::vector<double> kEps = {0.05, 0.15, 0.4};
const std::vector<double> kGammas = {0.5, 2.0, 8.0};

DecValue creg(const ModelClass& cls, const FiniteModel& ref, double eps, bool include_ref) {
    return constrained_dec(cls, ref, eps, Variant::constrained_regret, include_ref);
}
DecValue cpac(const ModelClass& cls, const FiniteModel& ref, double eps, Variant v = Variant::constrained_pac) {
    return constrained_dec(cls, ref, eps, v, false);
}

// Constrained DEC for an explicit adversary list.
DecValue sub_dec(const ModelClass& cls, const std::vector<std::size_t>& subset, const FiniteModel* extra,
                 const FiniteModel& ref, double scale, Variant v) {
    return solve(make_game(adversary_list(cls, subset, extra), ref), scale, v);
}

ModelClass with_ref(const ModelClass& cls, const FiniteModel& ref) {
    std::vector<FiniteModel> models = cls.models();
    models.push_back(ref);
    return ModelClass(std::move(models));
}

Dist random_dist(Rng& r, int n) { return r.dirichlet_flat(n); }

template <typename F>
void for_instances(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out, F&& body) {
    Sink sink(&s, out);
    for (int k = 0; k < opt.instances; ++k) {
        const std::uint64_t seed = instance_seed(opt, s.name, k);
        body(sink, seed);
    }
}

// Divergences.

void suite_triangle(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [](Sink& sink, std::uint64_t seed) {
        Rng r(seed);
        const int k = 2 + static_cast<int>(r.below(6));
        const Vector a = r.dirichlet_flat(k), b = r.dirichlet_flat(k), c = r.dirichlet_flat(k);
        const double ab = std::sqrt(hellinger_sq(a, b)), bc = std::sqrt(hellinger_sq(b, c));
        sink.add(seed, fmt({{"k", k}}), std::sqrt(hellinger_sq(a, c)), ab + bc);
    });
}

void suite_tv_hellinger(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [](Sink& sink, std::uint64_t seed) {
        Rng r(seed);
        const int k = 2 + static_cast<int>(r.below(6));
        const Vector a = r.dirichlet_flat(k), b = r.dirichlet_flat(k);
        const double h2 = hellinger_sq(a, b), t = tv(a, b);
        sink.add(seed, fmt({{"k", k}, {"side", 1}}), t, std::sqrt(h2));
        sink.add(seed, fmt({{"k", k}, {"side", 0}}), h2 / 2.0, t);
    });
}

void suite_value_difference(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        Rng r(seed ^ 0x5bd1e995ULL);
        const FiniteModel& m = in.cls[0];
        const Dist p = random_dist(r, m.decisions());
        const double lhs = p.dot((m.means() - in.ref.means()).cwiseAbs());
        sink.add(seed, "", lhs, std::sqrt(expected_hellinger_sq(m, in.ref, p)));
    });
}

void suite_joint_convexity(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [](Sink& sink, std::uint64_t seed) {
        Rng r(seed);
        const int k = 2 + static_cast<int>(r.below(6));
        const Vector a = r.dirichlet_flat(k), b = r.dirichlet_flat(k), c = r.dirichlet_flat(k),
                     d = r.dirichlet_flat(k);
        const double l = r.uniform();
        const double lhs = hellinger_sq((l * a + (1 - l) * b).eval(), (l * c + (1 - l) * d).eval());
        sink.add(seed, fmt({{"lambda", l}}), lhs, l * hellinger_sq(a, c) + (1 - l) * hellinger_sq(b, d));
    });
}

void suite_transcript_chain(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [](Sink& sink, std::uint64_t seed) {
        Rng r(seed);
        const int n = 2 + static_cast<int>(r.below(2));
        const int T = 2 + static_cast<int>(r.below(2));
        const FiniteModel m = make_random_model(r.next(), n, kBernoulli, 0);
        const FiniteModel ref = make_random_model(r.next(), n, kBernoulli, 0);
        const std::uint64_t key = r.next();
        // A history-dependent policy: a fixed pseudo-random pmf per history.
        const Policy alg = [key, n](std::span<const Step> h) {
            Rng pr(key);
            for (const Step& st : h) pr = pr.split(static_cast<std::uint64_t>(st.decision * 64 + st.outcome + 1));
            return Dist(pr.dirichlet_flat(n));
        };
        const TvUbReport rep = tv_ub_check(m, ref, alg, T, density_ratio_bound(ModelClass({m, ref})));
        sink.add(seed, fmt({{"T", T}, {"n", n}}), rep.lhs, rep.ct_proof * rep.expected_div);
    });
}

// Offset versus constrained.

void suite_lagrangian(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        const FiniteModel& ref = in.cls[in.member];
        std::vector<double> off_reg, off_pac;
        for (double g : gamma_grid()) {
            off_reg.push_back(hi(offset_dec(in.cls, ref, g, Variant::offset_regret)));
            off_pac.push_back(hi(offset_dec(in.cls, ref, g, Variant::offset_pac)));
        }
        for (double eps : kEps) {
            double rr = std::numeric_limits<double>::infinity(), rp = rr;
            for (std::size_t j = 0; j < gamma_grid().size(); ++j) {
                const double g = gamma_grid()[j];
                rr = std::min(rr, off_reg[j] + g * eps * eps);
                rp = std::min(rp, off_pac[j] + g * eps * eps);
            }
            sink.add(seed, fmt({{"eps", eps}, {"pac", 0}}), lo(creg(in.cls, ref, eps, false)), rr);
            sink.add(seed, fmt({{"eps", eps}, {"pac", 1}}), lo(cpac(in.cls, ref, eps)), rp);
        }
    });
}

void suite_union_regret(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        std::vector<double> off;
        for (double g : gamma_grid()) off.push_back(hi(offset_dec(in.cls, in.ref, g, Variant::offset_regret)));
        for (double eps : kEps) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < off.size(); ++j)
                best = std::min(best, std::max(off[j], 0.0) + gamma_grid()[j] * eps * eps);
            sink.add(seed, fmt({{"eps", eps}}), hi(creg(in.cls, in.ref, eps, true)), 8.0 * best + 7.0 * eps);
        }
    });
}

void suite_pac_constrained_offset(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        std::vector<double> off;
        for (double g : gamma_grid()) off.push_back(hi(offset_dec(in.cls, in.ref, g, Variant::offset_pac)));
        // gamma = 0: the plain game value.
        const double g0 = std::max(game_value(make_game(in.cls, in.ref, false)), 0.0);
        for (double eps : kEps) {
            double best = g0;
            for (std::size_t j = 0; j < off.size(); ++j)
                best = std::min(best, std::max(off[j], 0.0) + gamma_grid()[j] * eps * eps);
            sink.add(seed, fmt({{"eps", eps}}), hi(cpac(in.cls, in.ref, eps)), best);
        }
    });
}

void suite_pac_offset_constrained(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    std::vector<double> eps_grid = {1e-4};
    for (int j = 0; j <= 24; ++j) eps_grid.push_back(std::pow(2.0, -j / 2.0));
    eps_grid.push_back(std::sqrt(2.0));
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        std::vector<double> c;
        for (double eps : eps_grid) c.push_back(lo(cpac(in.cls, in.ref, eps)));
        for (double g : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const int L = 2 * static_cast<int>(std::ceil(std::log(2.0 * g)));
            double sup = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < eps_grid.size(); ++j)
                sup = std::max(sup, c[j] - g * eps_grid[j] * eps_grid[j] / 4.0);
            const double lhs = hi(offset_dec(in.cls, in.ref, g * (4 * L + 1), Variant::offset_pac));
            sink.add(seed, fmt({{"gamma", g}, {"L", L}}), lhs, 2.0 / g + sup);
        }
    });
}

void suite_offset_inverse_sqrt(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double g : {0.5, 1.0, 4.0, 16.0, 64.0}) {
            const double lhs = hi(offset_dec(in.cls, in.ref, g, Variant::offset_regret));
            sink.add(seed, fmt({{"gamma", g}}), lhs, lo(creg(in.cls, in.ref, 1.0 / std::sqrt(g), false)));
        }
    });
}

void suite_separation(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    // Deterministic construction: alpha = 1/2, beta = gamma^{-1/2}, arms = 256 gamma^2 / beta,
    // over a grid of gamma in [1, 4] and two arm counts per gamma.
    Sink sink(&s, out);
    const int points = std::max(1, opt.instances / 2);
    for (int k = 0; k < points; ++k) {
        const double g = points == 1 ? 1.0 : std::pow(4.0, static_cast<double>(k) / (points - 1));
        const double beta = 1.0 / std::sqrt(g);
        for (long mult : {1L, 2L}) {
            const long arms = mult * static_cast<long>(std::ceil(256.0 * g * g / beta));
            const double w = revealing_offset_witness(0.5, beta, arms, g);
            const std::string d = fmt({{"gamma", g}, {"arms", static_cast<double>(arms)}});
            sink.add(static_cast<std::uint64_t>(k), d, 0.5 / (2.0 + 8.0 * g * beta) - 4.0 * g / arms, w);
            sink.add(static_cast<std::uint64_t>(k), d + " floor", std::min(1.0 / std::sqrt(g), 1.0) / 64.0, w);
        }
    }
}

// Localization.

void suite_pac_localization(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double eps : kEps) {
            const double alpha = std::sqrt(3.0) * eps + hi(cpac(in.cls, in.ref, std::sqrt(6.0) * eps));
            const auto loc = localize(in.cls, in.ref, alpha);
            const double rhs =
                lo(sub_dec(in.cls, loc, nullptr, in.ref, std::sqrt(3.0) * eps, Variant::constrained_pac));
            sink.add(seed, fmt({{"eps", eps}, {"alpha", alpha}}), hi(cpac(in.cls, in.ref, eps)), rhs);
        }
    });
}

void suite_regret_localization(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double eps : kEps) {
            const DecValue d = creg(in.cls, in.ref, eps, false);
            const double alpha = eps + hi(d);
            const auto loc = localize(in.cls, in.ref, alpha);
            const double local = lo(sub_dec(in.cls, loc, nullptr, in.ref, eps, Variant::constrained_regret));
            for (double C : {std::sqrt(2.0), 2.0}) {
                const double lhs = hi(creg(in.cls, in.ref, eps / C, false));
                sink.add(seed, fmt({{"eps", eps}, {"C", C}}), lhs, lo(d) / (C * C) + local);
            }
            // Rescaled form, checked where the growth condition holds at this radius.
            const double C = 2.0, c = std::sqrt(2.0);
            const DecValue big = creg(in.cls, in.ref, C * eps, false);
            const DecValue small = creg(in.cls, in.ref, eps, false);
            if (big.value <= c * c * small.value) {
                const double a = C * eps + hi(big);
                const auto l2 = localize(in.cls, in.ref, a);
                const double c_loc = 1.0 / (1.0 / (c * c) - 1.0 / (C * C));
                const double rhs = lo(sub_dec(in.cls, l2, nullptr, in.ref, C * eps, Variant::constrained_regret));
                sink.add(seed, fmt({{"eps", eps}, {"C_loc", c_loc}}), hi(small), c_loc * rhs);
            }
        }
    });
}

void suite_localized_offset(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double alpha : {0.05, 0.3}) {
            const auto loc = localize(in.cls, in.ref, alpha);
            for (double g : {1.0, 4.0, 16.0}) {
                const double lhs = hi(sub_dec(in.cls, loc, &in.ref, in.ref, g, Variant::offset_regret));
                for (double eps : kEps) {
                    const double rhs = lo(creg(in.cls, in.ref, eps, true)) +
                                       std::max(0.0, alpha + 1.0 / (2.0 * g) - g * eps * eps / 2.0);
                    sink.add(seed, fmt({{"alpha", alpha}, {"gamma", g}, {"eps", eps}}), lhs, rhs);
                }
                const double e2 = std::sqrt(2.0 * alpha / g);
                sink.add(seed, fmt({{"alpha", alpha}, {"gamma", g}, {"eps", e2}}), lhs,
                         lo(creg(in.cls, in.ref, e2, true)) + 1.0 / (2.0 * g));
            }
        }
    });
}

void suite_one_sided(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        const int b = in.ref.best_index();
        for (double eps : kEps) {
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < in.cls.size(); ++i)
                if (in.ref.means()(b) <= in.cls[i].means()(b) + eps) keep.push_back(i);
            const double rhs = lo(sub_dec(in.cls, keep, nullptr, in.ref, eps, Variant::constrained_regret)) + eps;
            sink.add(seed, fmt({{"eps", eps}}), hi(creg(in.cls, in.ref, eps / std::sqrt(2.0), false)), rhs);
        }
    });
}

// Randomized references.

void suite_randomized_chain(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out,
                            Variant v) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double g : kGammas) {
            const DecValue off = offset_dec(in.cls, in.ref, g, v);
            const DecValue dual = bayesian_offset_dec(in.cls, in.ref, g, v);
            const Vector mu = *dual.prior;
            const DecValue rnd = randomized_dec(in.cls, mu, g / 4.0, v);
            const DecValue mixed = offset_dec(in.cls, mix_models(in.cls.models(), mu), g / 4.0, v);
            sink.add(seed, fmt({{"gamma", g}, {"step", 1}}), hi(off), lo(rnd));
            sink.add(seed, fmt({{"gamma", g}, {"step", 2}}), hi(rnd), lo(mixed));
        }
    });
}

void suite_randomized_localized(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        const FiniteModel mbar = mix_models(in.cls.models(), in.nu);
        std::vector<FiniteModel> full = in.cls.models();
        full.push_back(mbar);
        for (double alpha : {0.05, 0.3}) {
            const auto loc = localize(in.cls, mbar, alpha);
            const DecGame local = make_game(adversary_list(in.cls, loc, &mbar), in.cls.models(), in.nu);
            const DecGame all = make_game(full, in.cls.models(), in.nu);
            for (double g : {1.0, 4.0, 16.0}) {
                const double lhs = hi(solve_offset(local, g, Variant::offset_regret));
                for (double eps : kEps) {
                    const double rhs = lo(solve_constrained(all, eps, Variant::constrained_regret)) +
                                       std::max(0.0, alpha + 1.0 / (2.0 * g) - g * eps * eps / 2.0);
                    sink.add(seed, fmt({{"alpha", alpha}, {"gamma", g}, {"eps", eps}}), lhs, rhs);
                }
            }
        }
    });
}

// PAC variants.

void suite_pac_add_reference(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        const ModelClass plus = with_ref(in.cls, in.ref);
        for (double eps : kEps) {
            const double lhs = hi(cpac(plus, in.ref, eps));
            sink.add(seed, fmt({{"eps", eps}}), lhs, lo(cpac(in.cls, in.ref, std::sqrt(3.0) * eps)) + 4.0 * eps);
        }
    });
}

void suite_greedy(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double eps : kEps) {
            const DecValue pac = cpac(in.cls, in.ref, eps);
            const DecValue greedy = cpac(in.cls, in.ref, eps, Variant::constrained_pac_greedy);
            sink.add(seed, fmt({{"eps", eps}, {"side", 0}}), hi(pac), lo(greedy));
            sink.add(seed, fmt({{"eps", eps}, {"side", 1}}), hi(greedy),
                     lo(cpac(in.cls, in.ref, std::sqrt(3.0) * eps)) + 4.0 * eps);
        }
    });
}

void suite_double_ball(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double eps : kEps) {
            const DecValue pac = cpac(in.cls, in.ref, eps);
            sink.add(seed, fmt({{"eps", eps}, {"side", 0}}),
                     hi(cpac(in.cls, in.ref, eps, Variant::constrained_pac_alt)), lo(pac));
            sink.add(seed, fmt({{"eps", eps}, {"side", 1}}), hi(pac),
                     lo(cpac(in.cls, in.ref, std::sqrt(2.0) * eps, Variant::constrained_pac_alt)));
        }
    });
}

// Other structure.

void suite_minimax(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (double g : {0.5, 2.0, 8.0, 32.0})
            for (Variant v : {Variant::offset_regret, Variant::offset_pac}) {
                const double a = offset_dec(in.cls, in.ref, g, v).value;
                const double b = bayesian_offset_dec(in.cls, in.ref, g, v).value;
                sink.add(seed, fmt({{"gamma", g}, {"pac", v == Variant::offset_pac}}), std::abs(a - b), 0.0);
            }
    });
}

void suite_monotone(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    for_instances(s, opt, out, [&](Sink& sink, std::uint64_t seed) {
        const Instance in = make_instance(seed, opt);
        for (Variant v : {Variant::constrained_regret, Variant::constrained_pac}) {
            double prev = -std::numeric_limits<double>::infinity();
            for (double eps : {0.05, 0.1, 0.2, 0.4, 0.8}) {
                const DecValue d = constrained_dec(in.cls, in.ref, eps, v, false);
                if (std::isfinite(prev)) sink.add(seed, fmt({{"eps", eps}, {"variant", static_cast<int>(v)}}), prev, lo(d));
                prev = hi(d);
            }
        }
        double prev = std::numeric_limits<double>::infinity();
        for (double g : {0.25, 1.0, 4.0, 16.0}) {
            const double d = offset_dec(in.cls, in.ref, g, Variant::offset_regret).value;
            if (std::isfinite(prev)) sink.add(seed, fmt({{"gamma", g}}), d, prev);
            prev = d;
        }
    });
}

void suite_revealing_lower(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    Sink sink(&s, out);
    std::uint64_t k = 0;
    (void)opt;
    for (double beta : {0.1, 0.25, 0.5})
        for (int arms : {2, 3, 4, 6})
            for (double g : {0.5, 1.0, 2.0, 4.0, 8.0}) {
                const ModelClass cls = make_revealing_class(0.2, beta, arms);
                const FiniteModel& tilde = cls[cls.size() - 1];
                const double rhs = lo(offset_dec(cls, tilde, g, Variant::offset_regret));
                sink.add(k++, fmt({{"beta", beta}, {"arms", arms}, {"gamma", g}}),
                         0.2 / (2.0 + 8.0 * g * beta) - 4.0 * g / arms, rhs);
            }
}

void suite_revealing_upper(const Suite& s, const VerifyOptions& opt, std::vector<InequalityRecord>& out) {
    Sink sink(&s, out);
    std::uint64_t k = 0;
    HullGrid grid;
    grid.resolution = 4;
    grid.dirichlet_points = 16;
    grid.seed = opt.seed;
    for (double beta : {0.25, 0.5})
        for (int arms : {2, 3})
            for (double eps : {0.02, 0.05, 0.1, 0.2}) {
                const ModelClass cls = make_revealing_class(0.5, beta, arms);
                const HullResult h = hull_sup_dec(cls, eps, Variant::constrained_regret, true, grid);
                sink.add(k++, fmt({{"beta", beta}, {"arms", arms}, {"eps", eps}}), h.upper_max,
                         30.0 * eps * eps / beta);
            }
}

std::vector<Suite> build_suites() {
    std::vector<Suite> s;
    auto add = [&](std::string name, std::string statement,
                   void (*fn)(const Suite&, const VerifyOptions&, std::vector<InequalityRecord>&)) {
        s.push_back({std::move(name), std::move(statement), nullptr});
        const std::size_t idx = s.size() - 1;
        const std::string n = s[idx].name, st = s[idx].statement;
        s[idx].run = [n, st, fn](const VerifyOptions& o, std::vector<InequalityRecord>& out) {
            const Suite self{n, st, nullptr};
            fn(self, o, out);
        };
    };
    add("hellinger-triangle", "Hellinger distance D_H(a,c) <= D_H(a,b) + D_H(b,c)", suite_triangle);
    add("tv-le-hellinger", "D^2_H / 2 <= TV <= D_H", suite_tv_hellinger);
    add("value-difference-le-hellinger",
        "E_p |f^M - f^Mbar| <= sqrt(E_p D^2_H(M, Mbar)) for rewards in [0,1]", suite_value_difference);
    add("hellinger-joint-convexity", "D^2_H is jointly convex in its two arguments", suite_joint_convexity);
    add("transcript-hellinger-chain",
        "D^2_H between T-round transcript laws <= 256 log(T ^ V) * T * E_{q-bar} D^2_H(M, Mbar)",
        suite_transcript_chain);
    add("lagrangian", "constrained DEC(M, Mbar) <= inf_gamma offset DEC_gamma(M, Mbar) + gamma eps^2, Mbar in M",
        suite_lagrangian);
    add("constrained-vs-offset-regret",
        "regret c-DEC(M u {Mbar}, Mbar) <= 8 inf_gamma {max(o-DEC_gamma(M, Mbar), 0) + gamma eps^2} + 7 eps",
        suite_union_regret);
    add("pac-constrained-vs-offset", "pac c-DEC_eps <= inf_{gamma >= 0} {max(pac o-DEC_gamma, 0) + gamma eps^2}",
        suite_pac_constrained_offset);
    add("pac-offset-vs-constrained",
        "pac o-DEC at gamma(4L+1) <= 2/gamma + sup_eps {pac c-DEC_eps - gamma eps^2 / 4}, L = 2 ceil(ln 2 gamma)",
        suite_pac_offset_constrained);
    add("offset-le-constrained-at-inverse-sqrt-scale", "regret o-DEC_gamma <= regret c-DEC at eps = gamma^{-1/2}",
        suite_offset_inverse_sqrt);
    add("offset-constrained-separation",
        "revealing class (alpha 1/2, beta gamma^{-1/2}): o-DEC_gamma >= max(alpha/(2+8 gamma beta) - 4 gamma/A, "
        "min(gamma^{-1/2}, 1)/64) via a prior witness",
        suite_separation);
    add("pac-localization",
        "pac c-DEC_eps(M) <= pac c-DEC_{sqrt3 eps}(M_alpha), alpha = sqrt3 eps + pac c-DEC_{sqrt6 eps}(M)",
        suite_pac_localization);
    add("regret-localization",
        "c-DEC_{eps/C} <= c-DEC_eps / C^2 + c-DEC_eps(M_alpha), alpha = eps + c-DEC_eps; rescaled form under growth",
        suite_regret_localization);
    add("localized-offset-vs-constrained",
        "o-DEC_gamma(M_alpha u {Mbar}) <= c-DEC_eps(M u {Mbar}) + max(0, alpha + 1/(2 gamma) - gamma eps^2 / 2)",
        suite_localized_offset);
    add("one-sided-localization",
        "c-DEC_{eps/sqrt2}(M) <= c-DEC_eps(M') + eps, M' = {M : fbar(pibar) <= f^M(pibar) + eps}", suite_one_sided);
    add("randomized-offset-chain",
        "o-DEC_gamma(M, Mbar) <= randomized o-DEC_{gamma/4}(M, mu*) <= o-DEC_{gamma/4}(M, E_mu* M)",
        [](const Suite& s, const VerifyOptions& o, std::vector<InequalityRecord>& out) {
            suite_randomized_chain(s, o, out, Variant::offset_regret);
        });
    add("pac-randomized-chain",
        "pac o-DEC_gamma(M, Mbar) <= randomized pac o-DEC_{gamma/4}(M, mu*) <= pac o-DEC_{gamma/4}(M, E_mu* M)",
        [](const Suite& s, const VerifyOptions& o, std::vector<InequalityRecord>& out) {
            suite_randomized_chain(s, o, out, Variant::offset_pac);
        });
    add("randomized-localized-offset",
        "randomized o-DEC_gamma(M_alpha(Mbar_nu) u {Mbar_nu}, nu) <= randomized c-DEC_eps(M u {Mbar_nu}, nu) + "
        "max(0, alpha + 1/(2 gamma) - gamma eps^2 / 2)",
        suite_randomized_localized);
    add("pac-add-reference", "pac c-DEC_eps(M u {Mbar}) <= pac c-DEC_{sqrt3 eps}(M) + 4 eps",
        suite_pac_add_reference);
    add("pac-greedy-sandwich", "pac c-DEC_eps <= greedy c-DEC_eps <= pac c-DEC_{sqrt3 eps} + 4 eps", suite_greedy);
    add("pac-double-ball-sandwich", "double-ball c-DEC_eps <= pac c-DEC_eps <= double-ball c-DEC_{sqrt2 eps}",
        suite_double_ball);
    add("minimax-swap", "|offset DEC - Bayesian dual value| <= 1e-7", suite_minimax);
    add("monotonicity", "c-DEC nondecreasing in eps; o-DEC nonincreasing in gamma", suite_monotone);
    add("revealing-offset-lower",
        "revealing class (alpha 0.2): o-DEC_gamma(M, Mtilde) >= alpha/(2 + 8 gamma beta) - 4 gamma / A",
        suite_revealing_lower);
    add("revealing-constrained-upper", "revealing class: hull-sup regret c-DEC_eps <= 30 eps^2 / beta",
        suite_revealing_upper);
    return s;
}

}  // namespace

const std::vector<Suite>& suites() {
    static const std::vector<Suite> all = build_suites();
    return all;
}

const Suite& find_suite(const std::string& name) {
    for (const auto& s : suites())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown suite: " + name);
}

int VerificationReport::passed() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.pass; }));
}

int VerificationReport::failed() const { return static_cast<int>(records.size()) - passed(); }

double VerificationReport::worst_margin() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& r : records) w = std::min(w, r.margin);
    return w;
}

VerificationReport run_verification(const std::vector<std::string>& names, const VerifyOptions& opt) {
    std::vector<const Suite*> chosen;
    if (names.empty()) {
        for (const auto& s : suites()) chosen.push_back(&s);
    } else {
        for (const auto& n : names) chosen.push_back(&find_suite(n));
    }
    VerificationReport rep;
    for (const Suite* s : chosen) s->run(opt, rep.records);
    return rep;
}

double revealing_offset_witness(double alpha, double beta, long arms, double gamma) {
    if (arms < 2 || !(beta > 0.0 && beta <= 1.0) || !(gamma > 0.0)) throw std::invalid_argument("witness: bad parameters");
    const double A = static_cast<double>(arms);
    // Squared Hellinger distance at the revealing decision: the null observation
    // agrees, observation i+1 has beta vs beta/A, the other A-1 have 0 vs beta/A.
    const double d_reveal = std::pow(std::sqrt(beta) - std::sqrt(beta / A), 2) + (A - 1.0) * beta / A;
    // Prior payoffs per decision as lambda * (.) + (1 - lambda) * (.).
    const double arm = alpha * (1.0 - 1.0 / A) - 2.0 * gamma / A;  // tilde contributes 0 on arms
    const double reveal = 0.5 + alpha - gamma * d_reveal;          // tilde contributes 1/2 there
    if (arm <= 0.0) return 0.0;
    if (reveal >= arm) return arm;
    const double lambda = 0.5 / (arm - reveal + 0.5);
    return lambda * arm;
}

}  // namespace dmso
