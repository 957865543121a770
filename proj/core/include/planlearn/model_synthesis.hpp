#pragma once

#include <string>
#include <vector>

#include <map>
#include <set>

#include "planlearn/feature_synthesis.hpp"
#include "planlearn/noise_filter.hpp"
#include "planlearn/refinement.hpp"
#include "planlearn/rule_induction.hpp"
#include "planlearn/trace.hpp"

namespace planlearn {

struct LearnConfig {
  FilterConfig filter;
  RegressionConfig regression;
  RefineConfig refine;
  double rule_purity = 0.0;
  double closure_uniformity = 0.85;  // class share a closure feature needs
  bool skip_filters = false;      // ablation: bypass both noise-filter stages
  bool skip_refinement = false;   // ablation: take the heaviest rule per class
  int jobs = 1;                   // parallel per-action pipelines
  std::string domain_name = "learned";
};

// Observed change rates backing effect synthesis: the share of transition
// pairs (both sides observed) in which a literal actually flipped, and the
// set of fluents whose value was detected to evolve. Keys absent from the
// maps are unconstrained.
struct ChangeEvidence {
  std::map<LiftedKey, double> became_true;   // share of pairs going F -> T
  std::map<LiftedKey, double> became_false;  // share of pairs going T -> F
  std::set<LiftedKey> variant_fluents;
  bool restrict_assigns = false;  // only variant fluents may be assigned
  double min_share = 0.5;

  bool allows_add(const LiftedKey& k) const;
  bool allows_delete(const LiftedKey& k) const;
  bool allows_assign(const LiftedKey& k) const;
};

// Translates the refined pre/post rule pair into a PDDL action model.
// Preconditions come from the pre-state rule: literals and comparison
// features pinned true. A false-pinned literal whose attribute is also an
// add effect is omitted (the add already encodes the transition). Effects
// are the differences between the two meta-states plus one numeric effect
// per fitted delta; a numeric column pinned after the action but not before
// it (or pinned differently) becomes an assignment. Meta-state differences
// not corroborated by the change evidence are discarded: an effect has to be
// visible as an actual flip in the transitions, not just as a skew between
// the two class descriptions.
ActionModel synthesize_action(const Rule& pre_rule, const Rule& post_rule,
                              const std::string& name, int arity,
                              const std::vector<std::pair<FluentDelta, Expression>>& fitted,
                              const ChangeEvidence& evidence = {});

struct ActionReport {
  std::string action;
  int arity = 0;
  int transitions = 0;
  int rows = 0;
  int attributes = 0;
  int logical_erased = 0;
  int numeric_outliers = 0;
  int clusters = 0;
  struct VariantFluent {
    std::string target;
    std::string direction;
    int pairs = 0;
  };
  std::vector<VariantFluent> variants;
  struct Fit {
    std::string target;
    std::string expression;
    double score = 0;
    long long expansions = 0;
  };
  std::vector<Fit> fits;
  std::vector<std::string> features;
  int rules_pre = 0;
  int rules_post = 0;
  int refine_dropped = 0;
  int refine_conflicts = 0;
  int preconditions = 0;
  int effects = 0;
  std::string error;  // empty on success
};

struct LearnReport {
  std::vector<ActionReport> actions;  // sorted by action name

  std::string to_json() const;
};

struct LearnResult {
  Domain domain;
  LearnReport report;
};

// Full pipeline: group transitions, build per-action datasets, filter noise,
// synthesize features, induce rules, refine, and emit models. Actions that
// fail are recorded in the report; the domain holds those that succeed.
// Deterministic given cfg.filter.seed, independent of cfg.jobs.
LearnResult learn_domain(const std::vector<PlanTrace>& traces, const LearnConfig& cfg);

}  // namespace planlearn
