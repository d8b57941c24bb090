#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dmso/lp.hpp"
#include "dmso/model.hpp"

namespace dmso {

using Matrix = Eigen::MatrixXd;

// Margin for the strict "model excluded" pattern constraints.
inline constexpr double kPatternTau = 1e-9;
inline constexpr std::size_t kEnumerationCap = 16;

enum class Variant {
    offset_regret,
    offset_pac,
    constrained_regret,
    constrained_pac,
    constrained_pac_alt,
    constrained_pac_greedy,
};

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
bool is_offset(Variant v);

struct DecOptions {
    double tau = kPatternTau;
    std::size_t cap = kEnumerationCap;
    // Also solve the tau = 0 relaxation for the certified lower bound.
    bool certify = true;
};

struct DecDiagnostics {
    int lp_solves = 0;
    int iterations = 0;
    long patterns = 0;
    double tau = kPatternTau;
    double lower = 0.0;
    double upper = 0.0;
    bool certified = false;  // lower comes from the relaxation
    bool exact = true;       // false when the enumeration cap forced the heuristic path
};

struct DecValue {
    double value = 0.0;
    Dist witness_p;
    std::optional<Dist> witness_q;
    // Prior over adversaries for the Bayesian dual.
    std::optional<Vector> prior;
    // Adversary indices inside the ball at the witness.
    std::vector<std::size_t> active_set;
    DecDiagnostics diag;
};

// A DEC instance in matrix form: row i of G holds g^{M_i}, row i of H holds
// E_{ref ~ nu} D^2_H(M_i(pi), ref(pi)).
struct DecGame {
    Matrix G;
    Matrix H;
    int ref_best = -1;  // best decision of the (single) reference; -1 if randomized

    Eigen::Index adversaries() const { return G.rows(); }
    Eigen::Index decisions() const { return G.cols(); }
};

DecGame make_game(const std::vector<FiniteModel>& adversaries, const FiniteModel& ref);
DecGame make_game(const std::vector<FiniteModel>& adversaries, const std::vector<FiniteModel>& refs,
                  const Vector& nu);
// Game for (class [+ ref], ref) without copying the class.
DecGame make_game(const ModelClass& cls, const FiniteModel& ref, bool include_ref);
// Adversary list for (class, ref), with ref appended last when include_ref.
std::vector<FiniteModel> adversary_list(const ModelClass& cls, const FiniteModel* ref, bool include_ref);
std::vector<FiniteModel> adversary_list(const ModelClass& cls, const std::vector<std::size_t>& subset,
                                        const FiniteModel* extra);

// Solvers on a prepared game.
DecValue solve_offset(const DecGame& game, double gamma, Variant v);
DecValue solve_constrained(const DecGame& game, double eps, Variant v, const DecOptions& opt = {});
DecValue solve_bayesian_offset(const DecGame& game, double gamma, Variant v);
DecValue solve(const DecGame& game, double scale, Variant v, const DecOptions& opt = {});

// Objective of the constrained variants at fixed witnesses; this is what the
// certified upper bound evaluates.
double constrained_objective(const DecGame& game, double eps, Variant v, const Dist& p, const Dist& q);
// inf_p sup_M E_p g^M over all adversaries.
double game_value(const DecGame& game);

// Class-level entry points.
DecValue offset_dec(const ModelClass& cls, const FiniteModel& ref, double gamma, Variant v);
DecValue constrained_dec(const ModelClass& cls, const FiniteModel& ref, double eps, Variant v, bool include_ref,
                         const DecOptions& opt = {});
DecValue bayesian_offset_dec(const ModelClass& cls, const FiniteModel& ref, double gamma,
                             Variant v = Variant::offset_regret);
DecValue evaluate_dec(const ModelClass& cls, const FiniteModel& ref, double scale, Variant v, bool include_ref,
                      const DecOptions& opt = {});

// Randomized reference: divergences averaged over nu on the class. The extra
// model, when given, joins the adversaries (it is not a reference).
DecValue randomized_dec(const ModelClass& cls, const Vector& nu, double scale, Variant v,
                        const FiniteModel* extra_adversary = nullptr, const DecOptions& opt = {});

struct HullGrid {
    int resolution = 8;
    std::size_t max_models_for_grid = 6;
    int dirichlet_points = 64;
    std::uint64_t seed = 0;
    // Further references tried besides the hull points (e.g. improper ones).
    std::vector<FiniteModel> extra_refs;
};

// Mixture weights of the discretized hull: vertices, simplex grid, Dirichlet draws.
std::vector<Vector> hull_points(std::size_t models, const HullGrid& grid);

struct HullResult {
    DecValue best;
    Vector weights;            // maximizing mixture; empty when an extra ref won
    int extra_index = -1;      // index into extra_refs when it won
    double lower_max = 0.0;    // max over references of the certified lower bounds
    double upper_max = 0.0;    // max over references of the certified upper bounds
    std::size_t references = 0;
};

// sup over the discretized hull of dec(cls [+ ref], ref); a lower bound on the true sup.
HullResult hull_sup_dec(const ModelClass& cls, double scale, Variant v, bool include_ref, const HullGrid& grid,
                        const DecOptions& opt = {});

struct RefSpec {
    enum class Kind { proper_sup, hull_sup, given } kind = Kind::given;
    HullGrid hull;
    std::optional<FiniteModel> model;
};

struct DecProfile {
    Variant variant = Variant::constrained_regret;
    std::vector<double> grid;
    std::vector<DecValue> values;
    bool monotone = true;  // nondecreasing in eps / nonincreasing in gamma
    double worst_violation = 0.0;
};

DecProfile dec_profile(const ModelClass& cls, const RefSpec& ref, const std::vector<double>& grid, Variant v,
                       bool include_ref, const DecOptions& opt = {});

struct RegularityReport {
    bool regular = true;  // dec(eps) <= C^2 dec(eps / C)
    double worst_ratio = 0.0;
    std::optional<bool> strong;  // dec(C eps) <= c^2 dec(eps)
    double worst_strong_ratio = 0.0;
    bool interpolated = false;
    std::vector<double> strong_failures;  // radii where the strong condition fails
    int pairs_checked = 0;
};

RegularityReport regularity_check(const DecProfile& profile, double C_reg, std::optional<double> c_reg = {});

// Log-spaced grid of `points` values over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points);
// The default grid for infima over gamma: 40 points on [1e-1, 1e4].
const std::vector<double>& gamma_grid();

}  // namespace dmso
