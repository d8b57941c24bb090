#include "dmso/dec.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <stdexcept>

#include "dmso/divergence.hpp"
#include "dmso/rng.hpp"

namespace dmso {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::offset_regret: return "offset-regret";
        case Variant::offset_pac: return "offset-pac";
        case Variant::constrained_regret: return "constrained-regret";
        case Variant::constrained_pac: return "constrained-pac";
        case Variant::constrained_pac_alt: return "constrained-pac-alt";
        case Variant::constrained_pac_greedy: return "constrained-pac-greedy";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::offset_regret, Variant::offset_pac, Variant::constrained_regret,
                      Variant::constrained_pac, Variant::constrained_pac_alt, Variant::constrained_pac_greedy})
        if (name == variant_name(v)) return v;
    throw std::invalid_argument("unknown DEC variant: " + name);
}

bool is_offset(Variant v) { return v == Variant::offset_regret || v == Variant::offset_pac; }

namespace {

Dist uniform_dist(Eigen::Index n) { return Dist::Constant(n, 1.0 / static_cast<double>(n)); }

Dist point_mass(Eigen::Index n, Eigen::Index i) {
    Dist d = Dist::Zero(n);
    d(i) = 1.0;
    return d;
}

// Clamp LP roundoff and renormalize.
Dist clean(const Eigen::Ref<const Vector>& x) {
    Dist d = x.cwiseMax(0.0);
    const double s = d.sum();
    if (!(s > 0.0)) throw std::runtime_error("DEC solver: degenerate witness");
    return d / s;
}

Eigen::RowVectorXd ones_row(Eigen::Index vars, Eigen::Index from, Eigen::Index count) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(vars);
    r.segment(from, count).setOnes();
    return r;
}

std::vector<std::size_t> active(const Matrix& H, const Dist& x, double eps2) {
    std::vector<std::size_t> out;
    const Vector h = H * x;
    for (Eigen::Index i = 0; i < h.size(); ++i)
        if (h(i) <= eps2 + kBallSlack) out.push_back(static_cast<std::size_t>(i));
    return out;
}

void tally(DecDiagnostics& d, const LpResult& r) {
    ++d.lp_solves;
    d.iterations += r.iterations;
}

DecValue empty_class_value(Eigen::Index n, Variant v) {
    DecValue out;
    out.witness_p = uniform_dist(std::max<Eigen::Index>(n, 1));
    if (v != Variant::offset_regret && v != Variant::constrained_regret) out.witness_q = out.witness_p;
    out.diag.certified = true;
    return out;
}

}  // namespace

DecGame make_game(const std::vector<FiniteModel>& adversaries, const FiniteModel& ref) {
    DecGame g;
    const Eigen::Index n = ref.decisions();
    g.G.resize(static_cast<Eigen::Index>(adversaries.size()), n);
    g.H.resize(static_cast<Eigen::Index>(adversaries.size()), n);
    for (std::size_t i = 0; i < adversaries.size(); ++i) {
        g.G.row(i) = adversaries[i].gaps().transpose();
        g.H.row(i) = hellinger_rows(adversaries[i], ref).transpose();
    }
    g.ref_best = ref.best_index();
    return g;
}

DecGame make_game(const std::vector<FiniteModel>& adversaries, const std::vector<FiniteModel>& refs,
                  const Vector& nu) {
    if (refs.empty() || static_cast<Eigen::Index>(refs.size()) != nu.size())
        throw std::invalid_argument("make_game: reference/weight count mismatch");
    check_pmf(nu, "reference weights");
    DecGame g;
    const Eigen::Index n = refs.front().decisions();
    g.G.resize(static_cast<Eigen::Index>(adversaries.size()), n);
    g.H = Matrix::Zero(static_cast<Eigen::Index>(adversaries.size()), n);
    for (std::size_t i = 0; i < adversaries.size(); ++i) {
        g.G.row(i) = adversaries[i].gaps().transpose();
        for (std::size_t j = 0; j < refs.size(); ++j)
            if (nu(j) > 0.0) g.H.row(i) += nu(j) * hellinger_rows(adversaries[i], refs[j]).transpose();
    }
    for (Eigen::Index j = 0; j < nu.size(); ++j)
        if (nu(j) == 1.0) g.ref_best = refs[j].best_index();
    return g;
}

DecGame make_game(const ModelClass& cls, const FiniteModel& ref, bool include_ref) {
    DecGame g;
    const Eigen::Index m = static_cast<Eigen::Index>(cls.size()) + (include_ref ? 1 : 0);
    g.G.resize(m, ref.decisions());
    g.H.resize(m, ref.decisions());
    for (std::size_t i = 0; i < cls.size(); ++i) {
        g.G.row(i) = cls[i].gaps().transpose();
        g.H.row(i) = hellinger_rows(cls[i], ref).transpose();
    }
    if (include_ref) {
        g.G.row(m - 1) = ref.gaps().transpose();
        g.H.row(m - 1).setZero();
    }
    g.ref_best = ref.best_index();
    return g;
}

std::vector<FiniteModel> adversary_list(const ModelClass& cls, const FiniteModel* ref, bool include_ref) {
    std::vector<FiniteModel> out = cls.models();
    if (include_ref) {
        if (ref == nullptr) throw std::invalid_argument("adversary_list: include_ref without reference");
        out.push_back(*ref);
    }
    return out;
}

std::vector<FiniteModel> adversary_list(const ModelClass& cls, const std::vector<std::size_t>& subset,
                                        const FiniteModel* extra) {
    std::vector<FiniteModel> out;
    for (auto i : subset) out.push_back(cls[i]);
    if (extra != nullptr) out.push_back(*extra);
    return out;
}

double game_value(const DecGame& game) {
    const Eigen::Index n = game.decisions(), m = game.adversaries();
    if (m == 0) return 0.0;
    LpProblem lp(n + 1);
    lp.c(n) = 1.0;
    lp.free.assign(n + 1, false);
    lp.free[n] = true;
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::RowVectorXd row(n + 1);
        row << game.G.row(i), -1.0;
        lp.add_ub(row, 0.0);
    }
    lp.add_eq(ones_row(n + 1, 0, n), 1.0);
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) throw std::runtime_error("game_value: LP failed");
    return r.value;
}

DecValue solve_offset(const DecGame& game, double gamma, Variant v) {
    if (!(gamma > 0.0)) throw std::invalid_argument("offset DEC: gamma must be positive");
    const Eigen::Index n = game.decisions(), m = game.adversaries();
    if (m == 0) return empty_class_value(n, v);
    DecValue out;
    if (v == Variant::offset_regret) {
        LpProblem lp(n + 1);
        lp.c(n) = 1.0;
        lp.free.assign(n + 1, false);
        lp.free[n] = true;
        const Matrix A = game.G - gamma * game.H;
        for (Eigen::Index i = 0; i < m; ++i) {
            Eigen::RowVectorXd row(n + 1);
            row << A.row(i), -1.0;
            lp.add_ub(row, 0.0);
        }
        lp.add_eq(ones_row(n + 1, 0, n), 1.0);
        const LpResult r = solve_lp(lp);
        tally(out.diag, r);
        if (r.status != LpStatus::optimal) throw std::runtime_error("offset DEC: LP failed");
        out.witness_p = clean(r.x.head(n));
        const Vector vals = A * out.witness_p;
        out.value = vals.maxCoeff();
        for (Eigen::Index i = 0; i < m; ++i)
            if (vals(i) >= out.value - 1e-9) out.active_set.push_back(static_cast<std::size_t>(i));
    } else if (v == Variant::offset_pac) {
        LpProblem lp(2 * n + 1);
        lp.c(2 * n) = 1.0;
        lp.free.assign(2 * n + 1, false);
        lp.free[2 * n] = true;
        for (Eigen::Index i = 0; i < m; ++i) {
            Eigen::RowVectorXd row(2 * n + 1);
            row << game.G.row(i), -gamma * game.H.row(i), -1.0;
            lp.add_ub(row, 0.0);
        }
        lp.add_eq(ones_row(2 * n + 1, 0, n), 1.0);
        lp.add_eq(ones_row(2 * n + 1, n, n), 1.0);
        const LpResult r = solve_lp(lp);
        tally(out.diag, r);
        if (r.status != LpStatus::optimal) throw std::runtime_error("offset DEC: LP failed");
        out.witness_p = clean(r.x.head(n));
        out.witness_q = clean(r.x.segment(n, n));
        const Vector vals = game.G * out.witness_p - gamma * (game.H * *out.witness_q);
        out.value = vals.maxCoeff();
        for (Eigen::Index i = 0; i < m; ++i)
            if (vals(i) >= out.value - 1e-9) out.active_set.push_back(static_cast<std::size_t>(i));
    } else {
        throw std::invalid_argument("solve_offset: not an offset variant");
    }
    out.diag.lower = out.diag.upper = out.value;
    out.diag.certified = true;
    return out;
}

DecValue solve_bayesian_offset(const DecGame& game, double gamma, Variant v) {
    if (!(gamma > 0.0)) throw std::invalid_argument("Bayesian offset DEC: gamma must be positive");
    const Eigen::Index n = game.decisions(), m = game.adversaries();
    if (m == 0) return empty_class_value(n, v);
    DecValue out;
    if (v == Variant::offset_regret) {
        // max_mu min_pi mu'(G - gamma H)(pi)
        LpProblem lp(m + 1);
        lp.c(m) = -1.0;
        lp.free.assign(m + 1, false);
        lp.free[m] = true;
        const Matrix A = game.G - gamma * game.H;
        for (Eigen::Index d = 0; d < n; ++d) {
            Eigen::RowVectorXd row(m + 1);
            row << -A.col(d).transpose(), 1.0;
            lp.add_ub(row, 0.0);
        }
        lp.add_eq(ones_row(m + 1, 0, m), 1.0);
        const LpResult r = solve_lp(lp);
        tally(out.diag, r);
        if (r.status != LpStatus::optimal) throw std::runtime_error("Bayesian offset DEC: LP failed");
        const Vector mu = clean(r.x.head(m));
        const Eigen::RowVectorXd payoff = mu.transpose() * A;
        Eigen::Index best;
        out.value = payoff.minCoeff(&best);
        out.witness_p = point_mass(n, best);
        out.prior = mu;
    } else if (v == Variant::offset_pac) {
        // max_mu [min_pi mu'G(pi) - gamma max_pi mu'H(pi)]
        LpProblem lp(m + 2);
        lp.c(m) = -1.0;
        lp.c(m + 1) = gamma;
        lp.free.assign(m + 2, false);
        lp.free[m] = lp.free[m + 1] = true;
        for (Eigen::Index d = 0; d < n; ++d) {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m + 2);
            row.head(m) = -game.G.col(d).transpose();
            row(m) = 1.0;
            lp.add_ub(row, 0.0);
            Eigen::RowVectorXd row2 = Eigen::RowVectorXd::Zero(m + 2);
            row2.head(m) = game.H.col(d).transpose();
            row2(m + 1) = -1.0;
            lp.add_ub(row2, 0.0);
        }
        lp.add_eq(ones_row(m + 2, 0, m), 1.0);
        const LpResult r = solve_lp(lp);
        tally(out.diag, r);
        if (r.status != LpStatus::optimal) throw std::runtime_error("Bayesian offset DEC: LP failed");
        const Vector mu = clean(r.x.head(m));
        Eigen::Index pbest, qbest;
        const double g = (mu.transpose() * game.G).minCoeff(&pbest);
        const double h = (mu.transpose() * game.H).maxCoeff(&qbest);
        out.value = g - gamma * h;
        out.witness_p = point_mass(n, pbest);
        out.witness_q = point_mass(n, qbest);
        out.prior = mu;
    } else {
        throw std::invalid_argument("solve_bayesian_offset: not an offset variant");
    }
    out.diag.lower = out.diag.upper = out.value;
    out.diag.certified = true;
    return out;
}

double constrained_objective(const DecGame& game, double eps, Variant v, const Dist& p, const Dist& q) {
    const double eps2 = eps * eps;
    const Eigen::Index m = game.adversaries();
    const Vector hp = game.H * p;
    const Vector hq = game.H * q;
    Vector gains;
    if (v == Variant::constrained_pac_greedy) {
        if (game.ref_best < 0) throw std::invalid_argument("greedy DEC needs a single reference");
        gains = game.G.col(game.ref_best);
    } else {
        gains = game.G * p;
    }
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        bool in = false;
        switch (v) {
            case Variant::constrained_regret: in = hp(i) <= eps2 + kBallSlack; break;
            case Variant::constrained_pac:
            case Variant::constrained_pac_greedy: in = hq(i) <= eps2 + kBallSlack; break;
            case Variant::constrained_pac_alt: in = hp(i) <= eps2 + kBallSlack && hq(i) <= eps2 + kBallSlack; break;
            default: throw std::invalid_argument("constrained_objective: not a constrained variant");
        }
        if (in) best = std::max(best, gains(i));
    }
    return best;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
    double value = kInf;
    Dist p, q;
    bool found = false;
};

// Pattern enumeration for the constrained variants at one strictness margin.
class PatternSolver {
public:
    PatternSolver(const DecGame& g, double eps, Variant v, double tau, DecDiagnostics& diag)
        : g_(g), n_(g.decisions()), m_(g.adversaries()), eps2_(eps * eps), v_(v), diag_(diag) {
        hmin_ = g.H.rowwise().minCoeff();
        hmax_ = g.H.rowwise().maxCoeff();
        gmin_ = g.G.rowwise().minCoeff();
        tau_.resize(m_);
        can_in_.resize(m_);
        can_out_.resize(m_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            can_in_[i] = hmin_(i) <= eps2_;
            // A model that can never clear eps^2 + tau but can exceed eps^2 gets a
            // shrunken margin so that it still has a feasible side.
            if (hmax_(i) >= eps2_ + tau) {
                tau_[i] = tau;
                can_out_[i] = true;
            } else if (hmax_(i) > eps2_ && !can_in_[i]) {
                tau_[i] = 0.5 * (hmax_(i) - eps2_);
                can_out_[i] = true;
            } else {
                tau_[i] = tau;
                can_out_[i] = tau == 0.0 && hmax_(i) >= eps2_;
            }
        }
        if (v_ == Variant::constrained_pac_greedy) {
            if (g.ref_best < 0) throw std::invalid_argument("greedy DEC needs a single reference");
            greedy_gain_ = g.G.col(g.ref_best);
        }
    }

    // Number of models whose side is not forced by the prechecks.
    std::size_t free_count() const {
        std::size_t f = 0;
        for (Eigen::Index i = 0; i < m_; ++i) f += (can_in_[i] && can_out_[i]) ? 1 : 0;
        return f;
    }

    bool any_impossible() const {
        for (Eigen::Index i = 0; i < m_; ++i)
            if (!can_in_[i] && !can_out_[i]) return true;
        return false;
    }

    Candidate run() {
        if (any_impossible()) return {};
        std::vector<Eigen::Index> forced, free;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (can_in_[i] && can_out_[i]) free.push_back(i);
            else if (can_in_[i]) forced.push_back(i);
        }
        if (v_ == Variant::constrained_pac_alt) return run_alt(forced, free);
        return run_binary(forced, free);
    }

private:
    std::vector<bool> pattern(const std::vector<Eigen::Index>& forced, const std::vector<Eigen::Index>& free,
                              std::uint64_t mask) const {
        std::vector<bool> in(m_, false);
        for (auto i : forced) in[i] = true;
        for (std::size_t k = 0; k < free.size(); ++k)
            if ((mask >> k) & 1U) in[free[k]] = true;
        return in;
    }

    double pattern_lb(const std::vector<bool>& in) const {
        double lb = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (!in[i]) continue;
            lb = std::max(lb, v_ == Variant::constrained_pac_greedy ? greedy_gain_(i) : gmin_(i));
        }
        return lb;
    }

    // Regret: LP over (p, t) for one pattern.
    std::optional<Candidate> regret_lp(const std::vector<bool>& in) {
        LpProblem lp(n_ + 1);
        lp.c(n_) = 1.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_ + 1);
            if (in[i]) {
                row.head(n_) = g_.G.row(i);
                row(n_) = -1.0;
                lp.add_ub(row, 0.0);
                row.head(n_) = g_.H.row(i);
                row(n_) = 0.0;
                lp.add_ub(row, eps2_);
            } else {
                row.head(n_) = -g_.H.row(i);
                lp.add_ub(row, -(eps2_ + tau_[i]));
            }
        }
        lp.add_eq(ones_row(n_ + 1, 0, n_), 1.0);
        const LpResult r = solve_lp(lp);
        tally(diag_, r);
        if (r.status != LpStatus::optimal) return std::nullopt;
        Candidate c;
        c.found = true;
        c.value = std::max(0.0, r.value);
        c.p = clean(r.x.head(n_));
        return c;
    }

    // PAC: is there q realizing the pattern?
    std::optional<Dist> q_feasible(const std::vector<bool>& in) {
        LpProblem lp(n_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (in[i]) lp.add_ub(g_.H.row(i), eps2_);
            else lp.add_ub(-g_.H.row(i), -(eps2_ + tau_[i]));
        }
        lp.add_eq(Eigen::RowVectorXd::Ones(n_), 1.0);
        const LpResult r = solve_lp(lp);
        tally(diag_, r);
        if (r.status != LpStatus::optimal) return std::nullopt;
        return clean(r.x);
    }

    // min_p max_{i in S} G_i p, with its witness.
    std::pair<double, Dist> sub_game(const std::vector<bool>& in) {
        bool any = false;
        for (bool b : in) any = any || b;
        if (!any) {
            const Eigen::Index d = g_.ref_best >= 0 ? g_.ref_best : 0;
            return {0.0, point_mass(n_, d)};
        }
        if (v_ == Variant::constrained_pac_greedy) return {pattern_lb(in), point_mass(n_, g_.ref_best)};
        LpProblem lp(n_ + 1);
        lp.c(n_) = 1.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (!in[i]) continue;
            Eigen::RowVectorXd row(n_ + 1);
            row << g_.G.row(i), -1.0;
            lp.add_ub(row, 0.0);
        }
        lp.add_eq(ones_row(n_ + 1, 0, n_), 1.0);
        const LpResult r = solve_lp(lp);
        tally(diag_, r);
        if (r.status != LpStatus::optimal) throw std::runtime_error("constrained DEC: sub-game LP failed");
        return {std::max(0.0, r.value), clean(r.x.head(n_))};
    }

    Candidate run_binary(const std::vector<Eigen::Index>& forced, const std::vector<Eigen::Index>& free) {
        Candidate best;
        const std::size_t f = free.size();
        const bool pac = v_ != Variant::constrained_regret;
        std::vector<std::uint64_t> feasible_masks;
        for (std::size_t k = 0; k <= f; ++k) {
            // Subsets of size k in lexicographic order (Gosper's hack).
            std::uint64_t mask = k == 0 ? 0 : (std::uint64_t{1} << k) - 1;
            const std::uint64_t limit = std::uint64_t{1} << f;
            while (mask < limit) {
                ++diag_.patterns;
                bool dominated = false;
                if (pac)
                    for (auto fm : feasible_masks)
                        if ((mask & fm) == fm) {
                            dominated = true;
                            break;
                        }
                const std::vector<bool> in = pattern(forced, free, mask);
                if (!dominated && pattern_lb(in) < best.value) {
                    if (pac) {
                        if (auto q = q_feasible(in)) {
                            feasible_masks.push_back(mask);
                            auto [val, p] = sub_game(in);
                            if (val < best.value) best = {val, p, *q, true};
                        }
                    } else if (auto c = regret_lp(in)) {
                        if (c->value < best.value) best = *c;
                    }
                }
                if (best.found && best.value <= 0.0) return best;
                if (k == 0) break;
                const std::uint64_t c = mask & (~mask + 1);
                const std::uint64_t r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
            }
        }
        return best;
    }

    // Double ball: each model is either inside both balls or excluded by p or by q.
    Candidate run_alt(const std::vector<Eigen::Index>& forced, const std::vector<Eigen::Index>& free) {
        Candidate best;
        const std::size_t f = free.size();
        std::vector<int> state(f, 0);  // 0 in, 1 out via p, 2 out via q
        for (;;) {
            ++diag_.patterns;
            std::vector<int> side(m_, 0);
            for (std::size_t k = 0; k < f; ++k) side[free[k]] = state[k];
            for (Eigen::Index i = 0; i < m_; ++i) {
                if (can_in_[i] && can_out_[i]) continue;
                side[i] = can_in_[i] ? 0 : 1;
            }
            (void)forced;
            std::vector<bool> in(m_);
            for (Eigen::Index i = 0; i < m_; ++i) in[i] = side[i] == 0;
            if (pattern_lb(in) < best.value) {
                const Eigen::Index nv = 2 * n_ + 1;
                LpProblem lp(nv);
                lp.c(2 * n_) = 1.0;
                for (Eigen::Index i = 0; i < m_; ++i) {
                    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
                    if (side[i] == 0) {
                        row.head(n_) = g_.G.row(i);
                        row(2 * n_) = -1.0;
                        lp.add_ub(row, 0.0);
                        row.setZero();
                        row.head(n_) = g_.H.row(i);
                        lp.add_ub(row, eps2_);
                        row.setZero();
                        row.segment(n_, n_) = g_.H.row(i);
                        lp.add_ub(row, eps2_);
                    } else {
                        row.segment(side[i] == 1 ? 0 : n_, n_) = -g_.H.row(i);
                        lp.add_ub(row, -(eps2_ + tau_[i]));
                    }
                }
                lp.add_eq(ones_row(nv, 0, n_), 1.0);
                lp.add_eq(ones_row(nv, n_, n_), 1.0);
                const LpResult r = solve_lp(lp);
                tally(diag_, r);
                if (r.status == LpStatus::optimal && std::max(0.0, r.value) < best.value)
                    best = {std::max(0.0, r.value), clean(r.x.head(n_)), clean(r.x.segment(n_, n_)), true};
                if (best.found && best.value <= 0.0) return best;
            }
            std::size_t k = 0;
            while (k < f && state[k] == 2) state[k++] = 0;
            if (k == f) break;
            ++state[k];
        }
        return best;
    }

    const DecGame& g_;
    Eigen::Index n_, m_;
    double eps2_;
    Variant v_;
    DecDiagnostics& diag_;
    Vector hmin_, hmax_, gmin_, greedy_gain_;
    std::vector<double> tau_;
    std::vector<bool> can_in_, can_out_;
};

// Upper bound from a fixed candidate family; used above the enumeration cap.
Candidate heuristic_upper(const DecGame& g, double eps, Variant v, DecDiagnostics& diag) {
    const Eigen::Index n = g.decisions();
    std::vector<Dist> ps, qs;
    ps.push_back(uniform_dist(n));
    for (Eigen::Index d = 0; d < n; ++d) ps.push_back(point_mass(n, d));
    const Variant ov = v == Variant::constrained_regret ? Variant::offset_regret : Variant::offset_pac;
    for (double gamma : log_grid(1e-1, 1e4, 12)) {
        DecValue o = solve_offset(g, gamma, ov);
        diag.lp_solves += o.diag.lp_solves;
        ps.push_back(o.witness_p);
        if (o.witness_q) qs.push_back(*o.witness_q);
    }
    qs.insert(qs.end(), ps.begin(), ps.end());
    if (v == Variant::constrained_pac_greedy) ps = {point_mass(n, g.ref_best)};
    Candidate best;
    for (const auto& p : ps) {
        if (v == Variant::constrained_regret) {
            const double val = constrained_objective(g, eps, v, p, p);
            if (val < best.value) best = {val, p, p, true};
            continue;
        }
        for (const auto& q : qs) {
            const double val = constrained_objective(g, eps, v, p, q);
            if (val < best.value) best = {val, p, q, true};
        }
    }
    return best;
}

}  // namespace

DecValue solve_constrained(const DecGame& game, double eps, Variant v, const DecOptions& opt) {
    if (!(eps >= 0.0)) throw std::invalid_argument("constrained DEC: eps must be nonnegative");
    if (is_offset(v)) throw std::invalid_argument("solve_constrained: not a constrained variant");
    const Eigen::Index n = game.decisions();
    if (game.adversaries() == 0) return empty_class_value(n, v);

    DecValue out;
    out.diag.tau = opt.tau;
    PatternSolver strict(game, eps, v, opt.tau, out.diag);
    Candidate best;
    if (strict.free_count() <= opt.cap) best = strict.run();
    if (!best.found) {
        out.diag.exact = false;
        best = heuristic_upper(game, eps, v, out.diag);
    }
    const Dist& p = best.p;
    const Dist& q = best.q.size() ? best.q : best.p;
    const double upper = constrained_objective(game, eps, v, p, q);

    double lower = 0.0;
    if (out.diag.exact && opt.certify) {
        PatternSolver relaxed(game, eps, v, 0.0, out.diag);
        if (relaxed.free_count() <= opt.cap) {
            const Candidate r = relaxed.run();
            lower = r.found ? std::min(r.value, upper) : 0.0;
            out.diag.certified = true;
        }
    } else if (out.diag.exact) {
        lower = std::min(best.value, upper);
    }

    out.value = upper;
    out.witness_p = p;
    if (v != Variant::constrained_regret) out.witness_q = q;
    out.active_set = v == Variant::constrained_regret ? active(game.H, p, eps * eps) : active(game.H, q, eps * eps);
    if (v == Variant::constrained_pac_alt) {
        std::vector<std::size_t> both;
        const auto ap = active(game.H, p, eps * eps);
        std::set_intersection(ap.begin(), ap.end(), out.active_set.begin(), out.active_set.end(),
                              std::back_inserter(both));
        out.active_set = both;
    }
    out.diag.lower = lower;
    out.diag.upper = upper;
    return out;
}

DecValue solve(const DecGame& game, double scale, Variant v, const DecOptions& opt) {
    return is_offset(v) ? solve_offset(game, scale, v) : solve_constrained(game, scale, v, opt);
}

DecValue offset_dec(const ModelClass& cls, const FiniteModel& ref, double gamma, Variant v) {
    return solve_offset(make_game(cls, ref, false), gamma, v);
}

DecValue constrained_dec(const ModelClass& cls, const FiniteModel& ref, double eps, Variant v, bool include_ref,
                         const DecOptions& opt) {
    return solve_constrained(make_game(cls, ref, include_ref), eps, v, opt);
}

DecValue bayesian_offset_dec(const ModelClass& cls, const FiniteModel& ref, double gamma, Variant v) {
    return solve_bayesian_offset(make_game(cls, ref, false), gamma, v);
}

DecValue evaluate_dec(const ModelClass& cls, const FiniteModel& ref, double scale, Variant v, bool include_ref,
                      const DecOptions& opt) {
    return solve(make_game(cls, ref, include_ref), scale, v, opt);
}

DecValue randomized_dec(const ModelClass& cls, const Vector& nu, double scale, Variant v,
                        const FiniteModel* extra_adversary, const DecOptions& opt) {
    if (v == Variant::constrained_pac_greedy || v == Variant::constrained_pac_alt)
        throw std::invalid_argument("randomized_dec: variant has no randomized form");
    std::vector<FiniteModel> adv = cls.models();
    if (extra_adversary != nullptr) adv.push_back(*extra_adversary);
    return solve(make_game(adv, cls.models(), nu), scale, v, opt);
}

std::vector<Vector> hull_points(std::size_t models, const HullGrid& grid) {
    if (models == 0) throw std::invalid_argument("hull_points: empty class");
    const auto m = static_cast<Eigen::Index>(models);
    std::vector<Vector> pts;
    for (Eigen::Index i = 0; i < m; ++i) pts.push_back(point_mass(m, i));
    if (models == 1) return pts;
    if (models <= grid.max_models_for_grid && grid.resolution > 1) {
        // Compositions of `resolution` into m parts, skipping the vertices.
        std::vector<int> c(models, 0);
        const int res = grid.resolution;
        std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
            if (k + 1 == models) {
                c[k] = left;
                if (*std::max_element(c.begin(), c.end()) == res) return;
                Vector w(m);
                for (std::size_t j = 0; j < models; ++j) w(j) = static_cast<double>(c[j]) / res;
                pts.push_back(w);
                return;
            }
            for (int x = left; x >= 0; --x) {
                c[k] = x;
                rec(k + 1, left - x);
            }
        };
        rec(0, res);
    }
    Rng rng(grid.seed);
    for (int k = 0; k < grid.dirichlet_points; ++k) pts.push_back(rng.dirichlet_flat(m));
    return pts;
}

HullResult hull_sup_dec(const ModelClass& cls, double scale, Variant v, bool include_ref, const HullGrid& grid,
                        const DecOptions& opt) {
    const auto pts = hull_points(cls.size(), grid);
    if (pts.empty() && grid.extra_refs.empty()) throw std::invalid_argument("hull_sup_dec: empty grid");
    HullResult res;
    bool first = true;
    auto consider = [&](const FiniteModel& ref, const Vector* w, int extra) {
        DecValue d = evaluate_dec(cls, ref, scale, v, include_ref, opt);
        if (first || d.value > res.best.value) {
            res.best = d;
            res.weights = w ? *w : Vector();
            res.extra_index = extra;
        }
        res.lower_max = first ? d.diag.lower : std::max(res.lower_max, d.diag.lower);
        res.upper_max = first ? d.diag.upper : std::max(res.upper_max, d.diag.upper);
        first = false;
        ++res.references;
    };
    for (const auto& w : pts) consider(mix_models(cls.models(), w), &w, -1);
    for (std::size_t k = 0; k < grid.extra_refs.size(); ++k) consider(grid.extra_refs[k], nullptr, static_cast<int>(k));
    return res;
}

DecProfile dec_profile(const ModelClass& cls, const RefSpec& ref, const std::vector<double>& grid, Variant v,
                       bool include_ref, const DecOptions& opt) {
    if (grid.empty()) throw std::invalid_argument("dec_profile: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("dec_profile: grid not sorted");
    DecProfile prof;
    prof.variant = v;
    prof.grid = grid;
    for (double s : grid) {
        DecValue d;
        switch (ref.kind) {
            case RefSpec::Kind::given:
                if (!ref.model) throw std::invalid_argument("dec_profile: missing reference model");
                d = evaluate_dec(cls, *ref.model, s, v, include_ref, opt);
                break;
            case RefSpec::Kind::proper_sup: {
                double lo = 0.0, hi = 0.0;
                for (std::size_t i = 0; i < cls.size(); ++i) {
                    DecValue c = evaluate_dec(cls, cls[i], s, v, false, opt);
                    if (i == 0 || c.value > d.value) d = c;
                    lo = i == 0 ? c.diag.lower : std::max(lo, c.diag.lower);
                    hi = i == 0 ? c.diag.upper : std::max(hi, c.diag.upper);
                }
                d.diag.lower = lo;
                d.diag.upper = hi;
                break;
            }
            case RefSpec::Kind::hull_sup: {
                HullResult h = hull_sup_dec(cls, s, v, include_ref, ref.hull, opt);
                d = h.best;
                d.diag.lower = h.lower_max;
                d.diag.upper = h.upper_max;
                break;
            }
        }
        prof.values.push_back(d);
    }
    for (std::size_t k = 1; k < prof.values.size(); ++k) {
        const double step = prof.values[k].value - prof.values[k - 1].value;
        const double violation = is_offset(v) ? step : -step;
        if (violation > 1e-9) prof.monotone = false;
        prof.worst_violation = std::max(prof.worst_violation, violation);
    }
    return prof;
}

namespace {

std::optional<double> interpolate(const DecProfile& prof, double x, bool& interpolated) {
    const auto& g = prof.grid;
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (x < g.front() - tol || x > g.back() + tol) return std::nullopt;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (std::abs(g[k] - x) <= tol) return prof.values[k].value;
    interpolated = true;
    const auto it = std::upper_bound(g.begin(), g.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - g.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - g[lo]) / (g[hi] - g[lo]);
    return (1.0 - w) * prof.values[lo].value + w * prof.values[hi].value;
}

double safe_ratio(double num, double den) {
    if (den > 1e-15) return num / den;
    return num > 1e-15 ? kInf : 1.0;
}

}  // namespace

RegularityReport regularity_check(const DecProfile& profile, double C_reg, std::optional<double> c_reg) {
    if (profile.grid.size() < 2 || !(C_reg > 1.0)) throw std::invalid_argument("regularity_check: degenerate grid");
    RegularityReport rep;
    if (c_reg) rep.strong = true;
    for (std::size_t k = 0; k < profile.grid.size(); ++k) {
        const double e = profile.grid[k];
        const double d = profile.values[k].value;
        if (auto below = interpolate(profile, e / C_reg, rep.interpolated)) {
            ++rep.pairs_checked;
            rep.worst_ratio = std::max(rep.worst_ratio, safe_ratio(d, *below));
            if (d > C_reg * C_reg * *below + 1e-12) rep.regular = false;
        }
        if (c_reg) {
            if (auto above = interpolate(profile, C_reg * e, rep.interpolated)) {
                ++rep.pairs_checked;
                rep.worst_strong_ratio = std::max(rep.worst_strong_ratio, safe_ratio(*above, d));
                if (*above > *c_reg * *c_reg * d + 1e-12) {
                    rep.strong = false;
                    rep.strong_failures.push_back(e);
                }
            }
        }
    }
    if (rep.pairs_checked == 0) throw std::invalid_argument("regularity_check: no radius pairs inside the grid");
    return rep;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi >= lo) || points < 1) throw std::invalid_argument("log_grid: bad range");
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int k = 0; k < points; ++k) g[k] = std::exp(a + (b - a) * k / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

const std::vector<double>& gamma_grid() {
    static const std::vector<double> g = log_grid(1e-1, 1e4, 40);
    return g;
}

}  // namespace dmso
