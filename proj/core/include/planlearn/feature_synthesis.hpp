#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "planlearn/dataset.hpp"

namespace planlearn {

struct RegressionConfig {
  double acceptance_threshold = 0.02;
  // Wall-clock budget, converted to a deterministic node-expansion budget
  // (kExpansionsPerSecond) so results are machine-independent.
  double timeout_seconds = 300;
  std::vector<long long> constant_pool = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int max_expression_size = 9;   // node count cap
  double change_fraction = 0.5;  // share of observed pairs that must change
  // Residual-noise tolerance: a direction (or assignment target) needs this
  // share of agreeing pairs, and fit scoring drops the worst tail of per-pair
  // errors at the same rate.
  double noise_tolerance = 0.1;
  // Share of observed pre-state rows on which a candidate comparison must be
  // constant (the complement of the default statistical filter threshold).
  double uniformity = 0.95;
};

// Calibration constant for the search budget: candidates scored per second.
inline constexpr long long kExpansionsPerSecond = 2000;

enum class DeltaDirection { Increase, Decrease, Assign, Mixed };

std::string to_string(DeltaDirection d);

struct DeltaPair {
  std::size_t pre_row = 0;  // row index into the dataset
  double pre_value = 0;
  double post_value = 0;
};

// A fluent whose value evolves under the action, with the observed
// (pre, post) pairs per transition.
struct FluentDelta {
  LiftedKey target;
  std::vector<DeltaPair> pairs;  // transitions where both values are observed
  DeltaDirection direction = DeltaDirection::Mixed;
};

// Fluents whose value differs between pre and post in at least
// cfg.change_fraction of the pairs where both sides are observed.
std::vector<FluentDelta> detect_variant_fluents(const Dataset& d, const RegressionConfig& cfg);

struct FitResult {
  Expression expr;
  double score = 0;
  long long expansions = 0;
};

// Best-first search over arithmetic expressions for the change magnitude
// |post - pre| (Increase/Decrease) or the assigned value itself (Assign).
// Frontier is seeded with every numeric attribute and pool constant;
// successors extend an expression with one operator and one seed. Nodes are
// explored smallest-first, best score within a size layer; the first node
// whose normalized error is within cfg.acceptance_threshold wins, so the
// result is minimal-size among acceptable expressions, and a variable-free
// winner is folded to its constant. Returns nullopt for Mixed deltas, when
// the budget runs out, or when the bounded grammar is exhausted ("no
// arithmetic effect learned").
std::optional<FitResult> fit_expression(const Dataset& d, const FluentDelta& delta,
                                        const RegressionConfig& cfg,
                                        std::ostream* search_trace = nullptr);

// Candidate comparisons `lhs cmp rhs` (cmp in {>=, <=, =}; rhs a fitted
// expression or another numeric attribute). A candidate is kept when its
// truth value is uniform over at least `uniformity` of the observed pre-state
// rows and it is not trivial (same truth on every observed row of both
// classes, or syntactically x cmp x).
std::vector<ComparisonAttribute> derive_relational_features(
    const Dataset& d, const std::vector<std::pair<FluentDelta, Expression>>& fitted,
    double uniformity);

// Appends one logical column per feature; a row's cell is Missing when any
// referenced value is Missing.
Dataset extend_dataset(Dataset d, const std::vector<ComparisonAttribute>& features);

}  // namespace planlearn
