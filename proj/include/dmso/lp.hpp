#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dmso {

using LpMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// minimize c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x_j >= 0 unless free[j].
struct LpProblem {
    Eigen::VectorXd c;
    LpMatrix A_ub;
    Eigen::VectorXd b_ub;
    LpMatrix A_eq;
    Eigen::VectorXd b_eq;
    std::vector<bool> free;  // empty means all nonnegative

    explicit LpProblem(Eigen::Index n = 0)
        : c(Eigen::VectorXd::Zero(n)), A_ub(0, n), b_ub(0), A_eq(0, n), b_eq(0) {}

    Eigen::Index vars() const { return c.size(); }
    void add_ub(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs);
    void add_eq(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs);
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
};

inline constexpr double kLpTolerance = 1e-9;

// Dense two-phase tableau simplex with Bland's rule.
LpResult solve_lp(const LpProblem& problem);

}  // namespace dmso
