#pragma once

#include <optional>
#include <vector>

#include "dmso/model.hpp"

namespace dmso {

// Exponential weights with learning rate 1 under log loss (the Bayesian
// posterior over the active subclass). The class must outlive the oracle.
class ExpWeightsOracle {
public:
    explicit ExpWeightsOracle(const ModelClass& cls, const std::optional<std::vector<std::size_t>>& subset = {});

    // Posterior mixture over the base class; inactive models carry weight 0.
    MixtureModel predict() const;
    Vector weights() const;
    FiniteModel predict_model() const;

    // Multiplies each weight by the joint pmf of (reward, observation) at the
    // decision. Throws if the outcome is off-grid or impossible under every
    // active model; the state is unchanged in that case.
    void update(int decision, int reward_index, int obs);
    void update_value(int decision, double reward, int obs);

    const ModelClass& base() const { return *cls_; }
    const std::vector<std::size_t>& active() const { return active_; }
    long rounds() const { return rounds_; }
    std::size_t top_model() const;

private:
    const ModelClass* cls_;
    std::vector<std::size_t> active_;
    Vector log_w_;
    long rounds_ = 0;
};

// Sum over rounds of E_{p^t} D^2_H(truth, M-hat^t) for a trace of posterior weights.
double est_error(const ModelClass& cls, const std::vector<Vector>& weight_trace, const FiniteModel& truth,
                 const std::vector<Dist>& dists);

// Uniform average of the estimates.
MixtureModel online_to_batch(const std::vector<MixtureModel>& estimates);

// One row of an exported oracle trace.
struct OracleTraceRow {
    long t;
    int decision;
    int reward_index;
    int obs;
    std::size_t top_model;
    double est_running;
};

// Default high-probability bound used by the algorithms: c * log(|M| / delta).
double est_bound(std::size_t models, double delta, double constant = 1.0);

}  // namespace dmso
