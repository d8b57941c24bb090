#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dmso {

using Vector = Eigen::VectorXd;
// One row per decision; column r * alphabet + o holds P(reward_support[r], o).
using Kernel = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// A probability vector over decisions (p or q).
using Dist = Eigen::VectorXd;

inline constexpr double kPmfTolerance = 1e-12;

// Throws std::invalid_argument unless v is a pmf within kPmfTolerance.
void check_pmf(const Eigen::Ref<const Vector>& v, const char* what);

class FiniteModel {
public:
    FiniteModel() = default;
    FiniteModel(Vector reward_support, int obs_count, Kernel kernel);

    int decisions() const { return static_cast<int>(kernel_.rows()); }
    const Vector& reward_support() const { return support_; }
    int obs_count() const { return obs_count_; }
    // Size of the observation alphabet; the null observation is index 0.
    int alphabet() const { return obs_count_ > 0 ? obs_count_ : 1; }
    int outcomes() const { return static_cast<int>(kernel_.cols()); }

    const Kernel& kernel() const { return kernel_; }
    const Kernel& sqrt_kernel() const { return sqrt_kernel_; }
    const Vector& means() const { return means_; }
    // Suboptimality gaps g(pi) = f(pi_M) - f(pi).
    const Vector& gaps() const { return gaps_; }
    int best_index() const { return best_; }
    double best_value() const { return means_(best_); }

    double prob(int decision, int reward_index, int obs) const {
        return kernel_(decision, reward_index * alphabet() + obs);
    }

    bool same_spaces(const FiniteModel& other) const;
    bool operator==(const FiniteModel& other) const;

private:
    Vector support_;
    int obs_count_ = 0;
    Kernel kernel_;
    Kernel sqrt_kernel_;
    Vector means_;
    Vector gaps_;
    int best_ = 0;
};

class ModelClass {
public:
    ModelClass() = default;
    explicit ModelClass(std::vector<FiniteModel> models, std::vector<std::string> labels = {});

    std::size_t size() const { return models_.size(); }
    bool empty() const { return models_.empty(); }
    const FiniteModel& operator[](std::size_t i) const { return models_[i]; }
    const std::vector<FiniteModel>& models() const { return models_; }
    const std::vector<std::string>& labels() const { return labels_; }

    int decisions() const { return models_.front().decisions(); }
    const Vector& reward_support() const { return models_.front().reward_support(); }
    int obs_count() const { return models_.front().obs_count(); }

    ModelClass subset(const std::vector<std::size_t>& indices) const;
    bool operator==(const ModelClass& other) const;

private:
    std::vector<FiniteModel> models_;
    std::vector<std::string> labels_;
};

struct MixtureModel {
    const ModelClass* base = nullptr;
    Vector weights;
};

double mean_reward(const FiniteModel& model, int decision);
std::pair<int, double> best_decision(const FiniteModel& model);
double suboptimality(const FiniteModel& model, const Dist& p);

FiniteModel mixture_materialize(const MixtureModel& mix);
// Convex combination of arbitrary models sharing spaces.
FiniteModel mix_models(const std::vector<FiniteModel>& models, const Vector& weights);

struct DensityRatio {
    bool unbounded = false;
    double value = 0.0;  // meaningful only when bounded; always >= e
};
DensityRatio density_ratio_bound(const ModelClass& cls);

enum class LocalizeMode { one_sided, two_sided };
// Indices of the localized subclass; the result may be empty.
std::vector<std::size_t> localize(const ModelClass& cls, const FiniteModel& ref, double alpha,
                                  LocalizeMode mode = LocalizeMode::one_sided);

// Generators.
FiniteModel make_mab(const std::vector<double>& means);
ModelClass make_mab_class(double gap, int arms);
FiniteModel make_flat_reference(int arms);
// Arms are decisions 0..arms-1 and the revealing decision is index `arms`.
// Model i emits observation i+1 there; the optional last model is the
// uninformative one with rewards 1/2.
ModelClass make_revealing_class(double alpha, double beta, int arms, bool include_tilde = true);
FiniteModel make_revealing_tilde(double alpha, double beta, int arms);
ModelClass make_random_class(std::uint64_t seed, int decisions, int models,
                             const std::vector<double>& reward_support, int obs_count);
// Models with a random Bernoulli reward per decision and, when obs_count > 1, a
// random observation pmf; used for the randomized inequality suites.
FiniteModel make_random_model(std::uint64_t seed, int decisions,
                              const std::vector<double>& reward_support, int obs_count);
// Union counterexample: arms 0..arms-1 plus a revealing decision whose
// observation is a vector of independent bits, encoded as 1 + bitmask.
ModelClass make_union_class(double alpha, int arms);

}  // namespace dmso
