#include "dmso/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmso/rng.hpp"

namespace dmso {

void check_pmf(const Eigen::Ref<const Vector>& v, const char* what) {
    if (v.size() == 0) throw std::invalid_argument(std::string(what) + ": empty pmf");
    if ((v.array() < 0.0).any() || !v.allFinite())
        throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
    if (std::abs(v.sum() - 1.0) > kPmfTolerance)
        throw std::invalid_argument(std::string(what) + ": entries do not sum to 1");
}

FiniteModel::FiniteModel(Vector reward_support, int obs_count, Kernel kernel)
    : support_(std::move(reward_support)), obs_count_(obs_count), kernel_(std::move(kernel)) {
    if (support_.size() == 0) throw std::invalid_argument("FiniteModel: empty reward support");
    if (obs_count_ < 0) throw std::invalid_argument("FiniteModel: negative obs_count");
    for (Eigen::Index r = 0; r < support_.size(); ++r) {
        if (!(support_(r) >= 0.0 && support_(r) <= 1.0))
            throw std::invalid_argument("FiniteModel: reward outside [0,1]");
        if (r > 0 && !(support_(r) > support_(r - 1)))
            throw std::invalid_argument("FiniteModel: reward support not strictly increasing");
    }
    if (kernel_.rows() < 1) throw std::invalid_argument("FiniteModel: no decisions");
    if (kernel_.cols() != support_.size() * alphabet())
        throw std::invalid_argument("FiniteModel: kernel width does not match spaces");
    for (Eigen::Index d = 0; d < kernel_.rows(); ++d) check_pmf(kernel_.row(d).transpose(), "FiniteModel row");

    sqrt_kernel_ = kernel_.array().sqrt().matrix();
    const int a = alphabet();
    means_ = Vector::Zero(kernel_.rows());
    for (Eigen::Index d = 0; d < kernel_.rows(); ++d)
        for (Eigen::Index r = 0; r < support_.size(); ++r)
            means_(d) += support_(r) * kernel_.row(d).segment(r * a, a).sum();
    best_ = 0;
    for (Eigen::Index d = 1; d < means_.size(); ++d)
        if (means_(d) > means_(best_)) best_ = static_cast<int>(d);
    gaps_ = (means_(best_) - means_.array()).matrix();
}

bool FiniteModel::same_spaces(const FiniteModel& other) const {
    return decisions() == other.decisions() && obs_count_ == other.obs_count_ &&
           support_.size() == other.support_.size() && support_ == other.support_;
}

bool FiniteModel::operator==(const FiniteModel& other) const {
    return same_spaces(other) && kernel_ == other.kernel_;
}

ModelClass::ModelClass(std::vector<FiniteModel> models, std::vector<std::string> labels)
    : models_(std::move(models)), labels_(std::move(labels)) {
    if (models_.empty()) throw std::invalid_argument("ModelClass: empty class");
    for (const auto& m : models_)
        if (!m.same_spaces(models_.front())) throw std::invalid_argument("ModelClass: mismatched spaces");
    if (!labels_.empty() && labels_.size() != models_.size())
        throw std::invalid_argument("ModelClass: label count mismatch");
}

ModelClass ModelClass::subset(const std::vector<std::size_t>& indices) const {
    std::vector<FiniteModel> ms;
    std::vector<std::string> ls;
    for (auto i : indices) {
        ms.push_back(models_.at(i));
        if (!labels_.empty()) ls.push_back(labels_[i]);
    }
    return ModelClass(std::move(ms), std::move(ls));
}

bool ModelClass::operator==(const ModelClass& other) const {
    if (size() != other.size() || labels_ != other.labels_) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!(models_[i] == other.models_[i])) return false;
    return true;
}

double mean_reward(const FiniteModel& model, int decision) {
    if (decision < 0 || decision >= model.decisions()) throw std::out_of_range("mean_reward: decision");
    return model.means()(decision);
}

std::pair<int, double> best_decision(const FiniteModel& model) {
    return {model.best_index(), model.best_value()};
}

double suboptimality(const FiniteModel& model, const Dist& p) {
    if (p.size() != model.decisions()) throw std::invalid_argument("suboptimality: dimension mismatch");
    return model.gaps().dot(p);
}

FiniteModel mix_models(const std::vector<FiniteModel>& models, const Vector& weights) {
    if (models.empty() || static_cast<Eigen::Index>(models.size()) != weights.size())
        throw std::invalid_argument("mix_models: weight/model count mismatch");
    check_pmf(weights, "mixture weights");
    Kernel k = Kernel::Zero(models.front().decisions(), models.front().outcomes());
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (!models[i].same_spaces(models.front())) throw std::invalid_argument("mix_models: mismatched spaces");
        if (weights(i) != 0.0) k += weights(i) * models[i].kernel();
    }
    // Renormalize rows so roundoff never breaks the pmf invariant.
    for (Eigen::Index d = 0; d < k.rows(); ++d) k.row(d) /= k.row(d).sum();
    return FiniteModel(models.front().reward_support(), models.front().obs_count(), std::move(k));
}

FiniteModel mixture_materialize(const MixtureModel& mix) {
    if (mix.base == nullptr) throw std::invalid_argument("mixture_materialize: no base class");
    if (static_cast<Eigen::Index>(mix.base->size()) != mix.weights.size())
        throw std::invalid_argument("mixture_materialize: weight/class size mismatch");
    for (Eigen::Index i = 0; i < mix.weights.size(); ++i)
        if (mix.weights(i) == 1.0) return (*mix.base)[i];
    return mix_models(mix.base->models(), mix.weights);
}

DensityRatio density_ratio_bound(const ModelClass& cls) {
    double worst = std::exp(1.0);
    for (std::size_t i = 0; i < cls.size(); ++i) {
        for (std::size_t j = 0; j < cls.size(); ++j) {
            if (i == j) continue;
            const Kernel& a = cls[i].kernel();
            const Kernel& b = cls[j].kernel();
            for (Eigen::Index d = 0; d < a.rows(); ++d) {
                for (Eigen::Index x = 0; x < a.cols(); ++x) {
                    if (a(d, x) == 0.0 && b(d, x) == 0.0) continue;
                    if (a(d, x) == 0.0 || b(d, x) == 0.0) return {true, 0.0};
                    worst = std::max(worst, a(d, x) / b(d, x));
                }
            }
        }
    }
    return {false, worst};
}

std::vector<std::size_t> localize(const ModelClass& cls, const FiniteModel& ref, double alpha, LocalizeMode mode) {
    std::vector<std::size_t> out;
    const int ref_best = ref.best_index();
    const double ref_value = ref.best_value();
    for (std::size_t i = 0; i < cls.size(); ++i) {
        const FiniteModel& m = cls[i];
        if (!(m.best_value() <= ref_value + alpha)) continue;
        if (mode == LocalizeMode::two_sided && !(ref_value <= m.means()(ref_best) + alpha)) continue;
        out.push_back(i);
    }
    return out;
}

namespace {

Vector bernoulli_support() { return (Vector(2) << 0.0, 1.0).finished(); }

}  // namespace

FiniteModel make_mab(const std::vector<double>& means) {
    if (means.empty()) throw std::invalid_argument("make_mab: no arms");
    Kernel k(static_cast<Eigen::Index>(means.size()), 2);
    for (std::size_t a = 0; a < means.size(); ++a) {
        if (!(means[a] >= 0.0 && means[a] <= 1.0)) throw std::invalid_argument("make_mab: mean outside [0,1]");
        k(a, 0) = 1.0 - means[a];
        k(a, 1) = means[a];
    }
    return FiniteModel(bernoulli_support(), 0, std::move(k));
}

ModelClass make_mab_class(double gap, int arms) {
    if (arms < 1) throw std::invalid_argument("make_mab_class: arms < 1");
    if (!(gap >= 0.0 && gap <= 0.5)) throw std::invalid_argument("make_mab_class: gap outside [0,1/2]");
    std::vector<FiniteModel> ms;
    std::vector<std::string> labels;
    for (int i = 0; i < arms; ++i) {
        std::vector<double> means(arms, 0.5);
        means[i] = 0.5 + gap;
        ms.push_back(make_mab(means));
        labels.push_back("arm" + std::to_string(i));
    }
    return ModelClass(std::move(ms), std::move(labels));
}

FiniteModel make_flat_reference(int arms) { return make_mab(std::vector<double>(arms, 0.5)); }

namespace {

Vector revealing_support(double alpha) { return (Vector(3) << 0.0, 0.5, 0.5 + alpha).finished(); }

void check_revealing(double alpha, double beta, int arms) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("revealing class: alpha outside (0,1/2]");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("revealing class: beta outside (0,1]");
    if (arms < 2) throw std::invalid_argument("revealing class: arms < 2");
}

}  // namespace

FiniteModel make_revealing_tilde(double alpha, double beta, int arms) {
    check_revealing(alpha, beta, arms);
    const int alph = arms + 1;
    Kernel k = Kernel::Zero(arms + 1, 3 * alph);
    for (int a = 0; a < arms; ++a) k(a, 1 * alph + 0) = 1.0;
    k(arms, 0 * alph + 0) = 1.0 - beta;
    for (int o = 1; o <= arms; ++o) k(arms, 0 * alph + o) = beta / arms;
    return FiniteModel(revealing_support(alpha), alph, std::move(k));
}

ModelClass make_revealing_class(double alpha, double beta, int arms, bool include_tilde) {
    check_revealing(alpha, beta, arms);
    const int alph = arms + 1;
    std::vector<FiniteModel> ms;
    std::vector<std::string> labels;
    for (int i = 0; i < arms; ++i) {
        Kernel k = Kernel::Zero(arms + 1, 3 * alph);
        for (int a = 0; a < arms; ++a) k(a, (a == i ? 2 : 1) * alph + 0) = 1.0;
        k(arms, 0 * alph + 0) = 1.0 - beta;
        k(arms, 0 * alph + i + 1) += beta;
        ms.emplace_back(revealing_support(alpha), alph, std::move(k));
        labels.push_back("reveal" + std::to_string(i));
    }
    if (include_tilde) {
        ms.push_back(make_revealing_tilde(alpha, beta, arms));
        labels.push_back("tilde");
    }
    return ModelClass(std::move(ms), std::move(labels));
}

FiniteModel make_random_model(std::uint64_t seed, int decisions, const std::vector<double>& reward_support,
                              int obs_count) {
    if (decisions < 1) throw std::invalid_argument("make_random_model: decisions < 1");
    Rng rng(seed);
    Vector support = Eigen::Map<const Vector>(reward_support.data(), static_cast<Eigen::Index>(reward_support.size()));
    const int alph = obs_count > 0 ? obs_count : 1;
    const Eigen::Index width = support.size() * alph;
    Kernel k(decisions, width);
    for (int d = 0; d < decisions; ++d) k.row(d) = rng.dirichlet_flat(width).transpose();
    return FiniteModel(std::move(support), obs_count, std::move(k));
}

ModelClass make_random_class(std::uint64_t seed, int decisions, int models, const std::vector<double>& reward_support,
                             int obs_count) {
    if (models < 1) throw std::invalid_argument("make_random_class: models < 1");
    Rng root(seed);
    std::vector<FiniteModel> ms;
    for (int i = 0; i < models; ++i)
        ms.push_back(make_random_model(root.split(static_cast<std::uint64_t>(i)).next(), decisions, reward_support,
                                       obs_count));
    return ModelClass(std::move(ms));
}

ModelClass make_union_class(double alpha, int arms) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("make_union_class: alpha outside (0,1/2)");
    if (arms < 2 || arms > 10) throw std::invalid_argument("make_union_class: arms outside [2,10]");
    const int masks = 1 << arms;
    const int alph = masks + 1;
    std::vector<FiniteModel> ms;
    for (int a = 0; a < arms; ++a) {
        Kernel k = Kernel::Zero(arms + 1, 3 * alph);
        for (int j = 0; j < arms; ++j) k(j, (j == a ? 2 : 1) * alph + 0) = 1.0;
        for (int mask = 0; mask < masks; ++mask) {
            double pr = 1.0;
            for (int i = 0; i < arms; ++i) {
                const double on = 0.5 + (i == a ? alpha : 0.0);
                pr *= ((mask >> i) & 1) ? on : 1.0 - on;
            }
            k(arms, 0 * alph + 1 + mask) = pr;
        }
        ms.emplace_back((Vector(3) << 0.0, 0.5, 0.5 + alpha).finished(), alph, std::move(k));
    }
    return ModelClass(std::move(ms));
}

}  // namespace dmso
