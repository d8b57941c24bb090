#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dmso/dec.hpp"
#include "dmso/model.hpp"
#include "dmso/rng.hpp"

namespace dmso {

struct Outcome {
    int decision = 0;
    int reward_index = 0;
    int obs = 0;
    double reward = 0.0;
};

// Draws pi ~ dist, then (r, o) ~ model(pi).
Outcome protocol_step(const FiniteModel& model, const Dist& dist, Rng& rng);

struct Round {
    Dist dist;  // sampling distribution used this round
    Outcome outcome;
    double expected_regret = 0.0;  // <g^{M*}, dist>
};

struct Transcript {
    std::vector<Round> rounds;
    double total_regret() const;
};

// (p, q) for the PAC min-max at the current estimate.
using PacSolver = std::function<std::pair<Dist, Dist>(const ModelClass&, const FiniteModel& estimate, double eps)>;
// p for the regret min-max over the ball around the estimate plus the estimate itself.
using RegretSolver = std::function<Dist(const ModelClass&, const FiniteModel& estimate, double eps)>;

PacSolver default_pac_solver(const DecOptions& opt = {.certify = false});
RegretSolver default_regret_solver(const DecOptions& opt = {.certify = false});

struct PacConfig {
    long T = 0;
    double delta = 0.1;
    double est_constant = 1.0;
    PacSolver solver;  // empty means default_pac_solver()
    bool keep_transcript = true;
};

struct PacDiagnostics {
    int L = 0;
    long J = 0;
    double est_bar = 0.0;
    double eps_bar = 0.0;
    std::vector<long> t_ell;          // sampled exploration rounds (0-based)
    std::vector<double> test_stats;   // E_{q^{t_l}} D^2_H(M-hat^{t_l}, M-tilde_l)
    // E_{q^s} D^2_H(M*, M-hat^s) at the selected round; feeds the structural check.
    double selected_true_error = 0.0;
};

struct PacRunResult {
    Dist p_hat;
    Dist q_mean;  // average exploration distribution
    int ell_hat = 0;
    double risk = 0.0;
    Transcript transcript;
    PacDiagnostics diag;
};

struct PacParameters {
    int L;
    long J;
    double est_bar;
    double eps_bar;
};
PacParameters pac_parameters(std::size_t models, long T, double delta, double est_constant = 1.0);

// True model given by index; the environment is that class member.
PacRunResult run_pac(const ModelClass& cls, std::size_t true_index, const PacConfig& cfg, std::uint64_t seed);
// Environment given directly; it need not belong to the class (used by the adversary).
PacRunResult run_pac_env(const ModelClass& cls, const FiniteModel& env, const PacConfig& cfg, std::uint64_t seed);

struct RegretConfig {
    long T = 0;
    double delta = 0.1;
    double C0 = 20.0;  // reported only
    double C1 = 128.0;
    double est_constant = 1.0;
    RegretSolver solver;  // empty means default_regret_solver()
    bool break_on_success = false;
    bool keep_transcript = true;
};

struct EpochRecord {
    int epoch = 0;
    long explore_rounds = 0;
    long refine_rounds = 0;
    double eps = 0.0;
    std::size_t class_size = 0;  // |M_i|
    bool truth_in_class = false;
    bool refined = false;
    long J = 0;
    long s_chosen = -1;  // exploration round (0-based within the epoch) chosen as s_i
    bool s_from_success = false;
    double explore_regret = 0.0;
    double refine_regret = 0.0;
};

struct RegretRunResult {
    std::string algorithm;
    double regret = 0.0;
    std::vector<EpochRecord> epochs;
    Transcript transcript;
};

struct EpochSchedule {
    int N = 0;
    int L = 0;
    std::vector<long> explore;  // |E_i|
    std::vector<long> refine;   // |R_i|
};
EpochSchedule regret_schedule(long T, double delta);

RegretRunResult run_regret(const ModelClass& cls, std::size_t true_index, const RegretConfig& cfg, std::uint64_t seed);

enum class Baseline { ucb, thompson, uniform };
Baseline parse_baseline(const std::string& name);
RegretRunResult run_baseline(const ModelClass& cls, std::size_t true_index, long T, Baseline policy,
                             std::uint64_t seed);

}  // namespace dmso
