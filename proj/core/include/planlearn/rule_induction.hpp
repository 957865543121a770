#pragma once

#include <string>
#include <variant>
#include <vector>

#include "planlearn/dataset.hpp"

namespace planlearn {

// One conjunct of a rule antecedent: attribute = value. Values are truth
// values for logical columns and discrete labels for numeric ones.
struct Feature {
  AttributeId attr;
  std::variant<bool, double> value;

  std::string value_string() const;
};

std::string to_string(const Feature& f);

// Identity key for deduplication and conflict detection.
std::string feature_key(const Feature& f);

// Features on the same attribute (or, for comparisons, the same left-hand
// side and comparator) with different values conflict during merging.
std::string feature_conflict_key(const Feature& f);

bool satisfies(const Row& row, const Feature& f, const Dataset& d);

struct Rule {
  std::vector<Feature> antecedent;
  RowClass consequent = RowClass::PreState;
  double weight = 0;  // fraction of the class's rows satisfying the antecedent
};

std::string to_string(const Rule& r);

struct RuleSet {
  std::vector<Rule> rules;
  std::string fingerprint;  // of the training dataset

  std::string dump() const;  // one rule per line
};

// Sequential covering per class. A rule is grown greedily (feature maximizing
// in-class minus out-of-class coverage; ties by in-class coverage, then
// lexicographic) until out-of-class coverage is within purity_epsilon, then
// closed with the class's characterizing features: attributes whose majority
// value holds on at least closure_uniformity of the observed cells, both
// across the class and across the rows the rule covers. Rows disagreeing with
// a closure feature fall out of the rule's coverage and are re-covered by
// later rules. Missing cells never satisfy a feature. Weights are exact
// covered fractions over the full class. Every learnable row of a class ends
// up covered by some rule.
RuleSet learn_rules(const Dataset& d, double purity_epsilon = 0.0,
                    double closure_uniformity = 0.85);

}  // namespace planlearn
