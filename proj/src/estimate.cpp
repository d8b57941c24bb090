#include "dmso/estimate.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dmso/divergence.hpp"

namespace dmso {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vector normalize_log(const Vector& log_w) {
    const double mx = log_w.maxCoeff();
    if (mx == kNegInf) throw std::runtime_error("oracle: all weights are zero");
    // Eigen's vectorized exp does not send -inf to exactly 0
    Vector w = (log_w.array() == kNegInf).select(0.0, (log_w.array() - mx).exp()).matrix();
    return w / w.sum();
}

}  // namespace

ExpWeightsOracle::ExpWeightsOracle(const ModelClass& cls, const std::optional<std::vector<std::size_t>>& subset)
    : cls_(&cls) {
    if (cls.empty()) throw std::invalid_argument("oracle_init: empty class");
    if (subset) {
        if (subset->empty()) throw std::invalid_argument("oracle_init: empty constraint subset");
        for (auto i : *subset)
            if (i >= cls.size()) throw std::out_of_range("oracle_init: subset index");
        active_ = *subset;
    } else {
        active_.resize(cls.size());
        std::iota(active_.begin(), active_.end(), std::size_t{0});
    }
    log_w_ = Vector::Constant(static_cast<Eigen::Index>(cls.size()), kNegInf);
    for (auto i : active_) log_w_(i) = 0.0;
}

Vector ExpWeightsOracle::weights() const { return normalize_log(log_w_); }

MixtureModel ExpWeightsOracle::predict() const { return {cls_, weights()}; }

FiniteModel ExpWeightsOracle::predict_model() const { return mixture_materialize(predict()); }

void ExpWeightsOracle::update(int decision, int reward_index, int obs) {
    const FiniteModel& first = (*cls_)[0];
    if (decision < 0 || decision >= first.decisions()) throw std::out_of_range("oracle_update: decision");
    if (reward_index < 0 || reward_index >= first.reward_support().size() || obs < 0 || obs >= first.alphabet())
        throw std::invalid_argument("oracle_update: outcome off the class grid");
    Vector next = log_w_;
    for (auto i : active_) {
        if (next(i) == kNegInf) continue;
        const double pr = (*cls_)[i].prob(decision, reward_index, obs);
        next(i) = pr > 0.0 ? next(i) + std::log(pr) : kNegInf;
    }
    if (next.maxCoeff() == kNegInf) throw std::runtime_error("oracle_update: outcome impossible under every model");
    // Re-center to keep the log weights bounded over long runs.
    log_w_ = next.array() - next.maxCoeff();
    ++rounds_;
}

void ExpWeightsOracle::update_value(int decision, double reward, int obs) {
    const Vector& support = (*cls_)[0].reward_support();
    for (Eigen::Index r = 0; r < support.size(); ++r)
        if (support(r) == reward) return update(decision, static_cast<int>(r), obs);
    throw std::invalid_argument("oracle_update: reward off the support grid");
}

std::size_t ExpWeightsOracle::top_model() const {
    Eigen::Index best;
    log_w_.maxCoeff(&best);
    return static_cast<std::size_t>(best);
}

double est_error(const ModelClass& cls, const std::vector<Vector>& weight_trace, const FiniteModel& truth,
                 const std::vector<Dist>& dists) {
    if (weight_trace.size() != dists.size()) throw std::invalid_argument("est_error: length mismatch");
    double total = 0.0;
    for (std::size_t t = 0; t < dists.size(); ++t) {
        const FiniteModel est = mixture_materialize({&cls, weight_trace[t]});
        total += expected_hellinger_sq(truth, est, dists[t]);
    }
    return total;
}

MixtureModel online_to_batch(const std::vector<MixtureModel>& estimates) {
    if (estimates.empty()) throw std::invalid_argument("online_to_batch: empty sequence");
    Vector acc = Vector::Zero(estimates.front().weights.size());
    for (const auto& e : estimates) {
        if (e.base != estimates.front().base || e.weights.size() != acc.size())
            throw std::invalid_argument("online_to_batch: estimates over different classes");
        acc += e.weights;
    }
    return {estimates.front().base, acc / static_cast<double>(estimates.size())};
}

double est_bound(std::size_t models, double delta, double constant) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("est_bound: delta outside (0,1)");
    return constant * std::log(static_cast<double>(models) / delta);
}

}  // namespace dmso
