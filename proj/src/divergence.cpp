#include "dmso/divergence.hpp"

#include <algorithm>
#include <vector>

namespace dmso {

Vector hellinger_rows(const FiniteModel& a, const FiniteModel& b) {
    if (!a.same_spaces(b)) throw std::invalid_argument("hellinger_rows: space mismatch");
    return (a.sqrt_kernel() - b.sqrt_kernel()).rowwise().squaredNorm();
}

double expected_hellinger_sq(const FiniteModel& a, const FiniteModel& b, const Dist& p) {
    if (p.size() != a.decisions()) throw std::invalid_argument("expected_hellinger_sq: dimension mismatch");
    return hellinger_rows(a, b).dot(p);
}

bool in_ball(const FiniteModel& m, const FiniteModel& ref, const Dist& p, double eps) {
    return expected_hellinger_sq(m, ref, p) <= eps * eps + kBallSlack;
}

double ct_factor(long T, const DensityRatio& v, CtConvention convention) {
    if (T < 1) throw std::invalid_argument("ct_factor: T < 1");
    double arg = static_cast<double>(T);
    if (!v.unbounded) arg = std::min(arg, v.value);
    const double base = std::log(std::max(arg, std::exp(1.0)));
    return convention == CtConvention::proof ? 256.0 * base : base;
}

namespace {

struct Enumerator {
    const FiniteModel& m;
    const FiniteModel& ref;
    const Policy& alg;
    int T;
    std::vector<Step> history;
    double lhs = 0.0;
    Dist q_sum;
    long leaves = 0;

    void walk(int t, double pm, double pr) {
        if (t == T) {
            const double d = std::sqrt(pm) - std::sqrt(pr);
            lhs += d * d;
            ++leaves;
            return;
        }
        Dist q = alg(std::span<const Step>(history));
        check_pmf(q, "tv_ub_check policy output");
        q_sum += pr * q;
        for (int d = 0; d < m.decisions(); ++d) {
            if (q(d) <= 0.0) continue;
            for (int x = 0; x < m.outcomes(); ++x) {
                const double a = pm * q(d) * m.kernel()(d, x);
                const double b = pr * q(d) * ref.kernel()(d, x);
                if (a == 0.0 && b == 0.0) continue;
                history.push_back({d, x});
                walk(t + 1, a, b);
                history.pop_back();
            }
        }
    }
};

}  // namespace

TvUbReport tv_ub_check(const FiniteModel& m, const FiniteModel& ref, const Policy& alg, int T, const DensityRatio& v,
                       long max_leaves) {
    if (!m.same_spaces(ref)) throw std::invalid_argument("tv_ub_check: space mismatch");
    if (T < 1) throw std::invalid_argument("tv_ub_check: T < 1");
    const double branching = static_cast<double>(m.decisions()) * m.outcomes();
    if (std::pow(branching, T) > static_cast<double>(max_leaves))
        throw std::invalid_argument("tv_ub_check: transcript space too large to enumerate");

    Enumerator e{m, ref, alg, T, {}, 0.0, Dist::Zero(m.decisions()), 0};
    e.walk(0, 1.0, 1.0);

    TvUbReport r;
    r.lhs = e.lhs;
    r.q_bar = e.q_sum / T;
    r.expected_div = T * hellinger_rows(m, ref).dot(r.q_bar);
    r.ct_statement = ct_factor(T, v, CtConvention::statement);
    r.ct_proof = ct_factor(T, v, CtConvention::proof);
    r.slack_statement = r.ct_statement * r.expected_div - r.lhs;
    r.slack_proof = r.ct_proof * r.expected_div - r.lhs;
    r.transcripts = e.leaves;
    return r;
}

}  // namespace dmso
