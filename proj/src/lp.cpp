#include "dmso/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace dmso {

void LpProblem::add_ub(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) {
    if (row.size() != vars()) throw std::invalid_argument("LpProblem::add_ub: width mismatch");
    A_ub.conservativeResize(A_ub.rows() + 1, vars());
    A_ub.row(A_ub.rows() - 1) = row;
    b_ub.conservativeResize(b_ub.size() + 1);
    b_ub(b_ub.size() - 1) = rhs;
}

void LpProblem::add_eq(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) {
    if (row.size() != vars()) throw std::invalid_argument("LpProblem::add_eq: width mismatch");
    A_eq.conservativeResize(A_eq.rows() + 1, vars());
    A_eq.row(A_eq.rows() - 1) = row;
    b_eq.conservativeResize(b_eq.size() + 1);
    b_eq(b_eq.size() - 1) = rhs;
}

namespace {

constexpr int kMaxIterations = 200000;

class Tableau {
public:
    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(LpMatrix::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

    double& at(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
    double rhs(Eigen::Index i) const { return t_(i, t_.cols() - 1); }
    double& rhs(Eigen::Index i) { return t_(i, t_.cols() - 1); }
    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    Eigen::Index obj() const { return t_.rows() - 1; }
    std::vector<Eigen::Index>& basis() { return basis_; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = c;
    }

    // Bland's rule iterations on the current objective row. Returns false when unbounded.
    bool run(const std::vector<bool>& banned, int& iterations) {
        for (;;) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < cols(); ++j) {
                if (banned[j]) continue;
                if (t_(obj(), j) < -kLpTolerance) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            Eigen::Index leave = -1;
            double best = 0.0;
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double a = t_(i, enter);
                if (a <= kLpTolerance) continue;
                const double ratio = rhs(i) / a;
                if (leave < 0 || ratio < best - kLpTolerance ||
                    (std::abs(ratio - best) <= kLpTolerance && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
            if (++iterations > kMaxIterations) throw std::runtime_error("solve_lp: iteration limit");
        }
    }

    void set_objective(const Eigen::VectorXd& cost) {
        t_.row(obj()).setZero();
        t_.row(obj()).head(cost.size()) = cost.transpose();
        for (Eigen::Index i = 0; i < rows(); ++i) {
            const double cb = cost(basis_[i]);
            if (cb != 0.0) t_.row(obj()) -= cb * t_.row(i);
        }
    }

private:
    LpMatrix t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& lp) {
    const Eigen::Index n = lp.vars();
    if (!lp.free.empty() && static_cast<Eigen::Index>(lp.free.size()) != n)
        throw std::invalid_argument("solve_lp: free mask width mismatch");
    if (lp.A_ub.rows() != lp.b_ub.size() || lp.A_eq.rows() != lp.b_eq.size())
        throw std::invalid_argument("solve_lp: rhs size mismatch");

    // Free variables are split into positive and negative parts.
    std::vector<Eigen::Index> neg_col(n, -1);
    Eigen::Index ns = n;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!lp.free.empty() && lp.free[j]) neg_col[j] = ns++;

    const Eigen::Index mu = lp.A_ub.rows();
    const Eigen::Index me = lp.A_eq.rows();
    const Eigen::Index m = mu + me;

    std::vector<bool> needs_art(m, false);
    Eigen::Index arts = 0;
    for (Eigen::Index i = 0; i < mu; ++i)
        if (lp.b_ub(i) < 0.0) needs_art[i] = true;
    for (Eigen::Index i = mu; i < m; ++i) needs_art[i] = true;
    for (Eigen::Index i = 0; i < m; ++i) arts += needs_art[i] ? 1 : 0;

    const Eigen::Index slack0 = ns;
    const Eigen::Index art0 = ns + mu;
    const Eigen::Index cols = art0 + arts;
    Tableau tab(m, cols);

    Eigen::Index next_art = art0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool is_ub = i < mu;
        const auto row = is_ub ? lp.A_ub.row(i) : lp.A_eq.row(i - mu);
        double b = is_ub ? lp.b_ub(i) : lp.b_eq(i - mu);
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            tab.at(i, j) = sign * row(j);
            if (neg_col[j] >= 0) tab.at(i, neg_col[j]) = -sign * row(j);
        }
        if (is_ub) tab.at(i, slack0 + i) = sign;
        tab.rhs(i) = sign * b;
        if (needs_art[i]) {
            tab.at(i, next_art) = 1.0;
            tab.basis()[i] = next_art++;
        } else {
            tab.basis()[i] = slack0 + i;
        }
    }

    LpResult res;
    std::vector<bool> banned(cols, false);

    if (arts > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
        phase1.tail(arts).setOnes();
        tab.set_objective(phase1);
        tab.run(banned, res.iterations);
        double scale = 1.0;
        for (Eigen::Index i = 0; i < m; ++i) scale = std::max(scale, std::abs(i < mu ? lp.b_ub(i) : lp.b_eq(i - mu)));
        if (-tab.rhs(tab.obj()) > kLpTolerance * scale) {
            res.status = LpStatus::infeasible;
            return res;
        }
        // Drive artificials out of the basis; rows where that is impossible are redundant.
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis()[i] < art0) continue;
            for (Eigen::Index j = 0; j < art0; ++j) {
                if (std::abs(tab.at(i, j)) > kLpTolerance) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
        for (Eigen::Index j = art0; j < cols; ++j) banned[j] = true;
    }

    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index j = 0; j < n; ++j) {
        cost(j) = lp.c(j);
        if (neg_col[j] >= 0) cost(neg_col[j]) = -lp.c(j);
    }
    tab.set_objective(cost);
    if (!tab.run(banned, res.iterations)) {
        res.status = LpStatus::unbounded;
        return res;
    }

    Eigen::VectorXd ext = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index i = 0; i < m; ++i) ext(tab.basis()[i]) = tab.rhs(i);
    res.x = ext.head(n);
    for (Eigen::Index j = 0; j < n; ++j)
        if (neg_col[j] >= 0) res.x(j) -= ext(neg_col[j]);
    res.value = lp.c.dot(res.x);
    res.status = LpStatus::optimal;
    return res;
}

}  // namespace dmso
