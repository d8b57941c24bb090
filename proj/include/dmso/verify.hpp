#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dmso {

inline constexpr double kVerifyTolerance = 1e-7;

struct VerifyOptions {
    std::uint64_t seed = 0;
    int instances = 50;
    int max_decisions = 5;  // random instances use 2..max_decisions decisions
    int max_models = 6;     // and 2..max_models models
};

// One checked inequality lhs <= rhs.
struct InequalityRecord {
    std::string suite;
    std::string statement;  // the inequality, in words
    std::uint64_t seed = 0;
    std::string detail;     // parameters of this instance
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    bool pass = false;
};

struct Suite {
    std::string name;
    std::string statement;
    std::function<void(const VerifyOptions&, std::vector<InequalityRecord>&)> run;
};

const std::vector<Suite>& suites();
const Suite& find_suite(const std::string& name);

struct VerificationReport {
    std::vector<InequalityRecord> records;
    int passed() const;
    int failed() const;
    double worst_margin() const;
};

// Runs the named suites (all when empty); throws std::invalid_argument on an unknown name.
VerificationReport run_verification(const std::vector<std::string>& names, const VerifyOptions& opt);

// Offset regret DEC lower bound on the revealing class from the prior that puts
// weight lambda uniformly on the revealing models and 1 - lambda on the
// uninformative one, maximized over lambda. Evaluated in closed form so that
// it scales to thousands of arms.
double revealing_offset_witness(double alpha, double beta, long arms, double gamma);

}  // namespace dmso
