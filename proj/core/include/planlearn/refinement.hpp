#pragma once

#include <string>
#include <vector>

#include "planlearn/rule_induction.hpp"

namespace planlearn {

struct RefineConfig {
  double irrelevance_ratio = 0.05;     // cutoff as a fraction of the top support
  double interval_coefficient = 0.1;   // conflict interval half-width over mean support
};

struct SupportedFeature {
  Feature feature;
  double support = 0;  // sum of the weights of the rules containing it
};

enum class ConflictDecision { DropWeaker, DropBoth };

// Supports within interval_coefficient of their mean are statistically
// indistinguishable: drop both. A clear difference drops the weaker side.
ConflictDecision solve_conflict(double s1, double s2, const RefineConfig& cfg);

// Decomposes the antecedents of one class's rules into supported features,
// discards those under irrelevance_ratio * max_support, and sorts by
// descending support (ties lexicographic). Throws PipelineError on an empty
// ruleset.
std::vector<SupportedFeature> extract_supported_features(const std::vector<Rule>& rules,
                                                         const RefineConfig& cfg);

struct RefineReport {
  struct Conflict {
    std::string existing, incoming;
    double existing_support = 0, incoming_support = 0;
    ConflictDecision decision = ConflictDecision::DropWeaker;
  };
  std::vector<std::string> dropped_irrelevant;  // per class, "feature [s=..]"
  std::vector<Conflict> conflicts;
  bool empty_antecedent = false;

  std::string to_json() const;
};

// Folds the ordered features into a single rule. A feature conflicting with
// an already-included one is resolved by solve_conflict; DropBoth erases the
// included feature and blocks the attribute for the rest of the merge.
Rule merge_features(const std::vector<SupportedFeature>& ordered, RowClass cls,
                    const RefineConfig& cfg, RefineReport* report = nullptr);

struct RefineResult {
  Rule pre_rule;
  Rule post_rule;
  RefineReport report;
};

// Splits the ruleset by class and reduces each side to one rule.
// Throws PipelineError when a class has no rules.
RefineResult refine(const RuleSet& rs, const RefineConfig& cfg);

}  // namespace planlearn
