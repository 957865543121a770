#include "planlearn/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "planlearn/errors.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

ConflictDecision solve_conflict(double s1, double s2, const RefineConfig& cfg) {
  double mean = (s1 + s2) / 2.0;
  double delta = std::fabs(s1 - s2);
  return delta <= cfg.interval_coefficient * mean ? ConflictDecision::DropBoth
                                                  : ConflictDecision::DropWeaker;
}

std::vector<SupportedFeature> extract_supported_features(const std::vector<Rule>& rules,
                                                         const RefineConfig& cfg) {
  if (rules.empty()) throw PipelineError("extract_supported_features: empty ruleset");

  std::map<std::string, SupportedFeature> by_key;
  for (const auto& rule : rules) {
    for (const auto& f : rule.antecedent) {
      auto [it, inserted] = by_key.try_emplace(feature_key(f), SupportedFeature{f, 0.0});
      it->second.support += rule.weight;
    }
  }

  double max_support = 0;
  for (const auto& [key, sf] : by_key) max_support = std::max(max_support, sf.support);

  std::vector<SupportedFeature> out;
  for (const auto& [key, sf] : by_key) {
    if (sf.support < cfg.irrelevance_ratio * max_support) continue;
    out.push_back(sf);
  }
  std::sort(out.begin(), out.end(), [](const SupportedFeature& a, const SupportedFeature& b) {
    if (a.support != b.support) return a.support > b.support;
    return feature_key(a.feature) < feature_key(b.feature);
  });
  return out;
}

Rule merge_features(const std::vector<SupportedFeature>& ordered, RowClass cls,
                    const RefineConfig& cfg, RefineReport* report) {
  Rule rule;
  rule.consequent = cls;

  // conflict key -> position of the representative feature
  std::map<std::string, std::size_t> included;
  std::set<std::string> blocked;
  std::vector<SupportedFeature> kept;

  for (const auto& sf : ordered) {
    std::string ckey = feature_conflict_key(sf.feature);
    if (blocked.count(ckey)) continue;
    auto it = included.find(ckey);
    if (it == included.end()) {
      included.emplace(ckey, kept.size());
      kept.push_back(sf);
      continue;
    }
    const SupportedFeature& existing = kept[it->second];
    if (feature_key(existing.feature) == feature_key(sf.feature)) continue;  // deduplicated earlier

    // A numeric column contested between two centroids cannot be pinned to a
    // single label, so no equality survives. Logical and comparison features
    // go through the confidence-interval decision.
    const auto* la = std::get_if<LiftedAttribute>(&sf.feature.attr);
    bool contested_numeric = la && la->kind == AttrKind::Numeric;
    ConflictDecision decision = contested_numeric
                                    ? ConflictDecision::DropBoth
                                    : solve_conflict(existing.support, sf.support, cfg);
    if (report)
      report->conflicts.push_back({to_string(existing.feature), to_string(sf.feature),
                                   existing.support, sf.support, decision});
    if (decision == ConflictDecision::DropBoth) {
      kept[it->second].support = -1;  // tombstone
      included.erase(it);
      blocked.insert(ckey);
    }
    // DropWeaker keeps the existing feature: the incoming one cannot have
    // higher support in a descending fold.
  }

  for (const auto& sf : kept)
    if (sf.support >= 0) rule.antecedent.push_back(sf.feature);
  std::sort(rule.antecedent.begin(), rule.antecedent.end(),
            [](const Feature& a, const Feature& b) { return feature_key(a) < feature_key(b); });

  double top = 0;
  for (const auto& sf : ordered) top = std::max(top, sf.support);
  rule.weight = top;

  if (rule.antecedent.empty() && report) report->empty_antecedent = true;
  return rule;
}

RefineResult refine(const RuleSet& rs, const RefineConfig& cfg) {
  std::vector<Rule> pre, post;
  for (const auto& r : rs.rules)
    (r.consequent == RowClass::PreState ? pre : post).push_back(r);
  if (pre.empty() || post.empty())
    throw PipelineError(std::string("refine: missing class: no ") +
                        (pre.empty() ? "pre-state" : "post-state") + " rules");

  RefineResult result;
  for (RowClass cls : {RowClass::PreState, RowClass::PostState}) {
    const auto& rules = cls == RowClass::PreState ? pre : post;
    auto all = extract_supported_features(rules, RefineConfig{0.0, cfg.interval_coefficient});
    auto filtered = extract_supported_features(rules, cfg);
    std::set<std::string> keep;
    for (const auto& sf : filtered) keep.insert(feature_key(sf.feature));
    for (const auto& sf : all)
      if (!keep.count(feature_key(sf.feature)))
        result.report.dropped_irrelevant.push_back(to_string(cls) + " " + to_string(sf.feature) +
                                                   " [s=" + format_number(sf.support) + "]");
    Rule merged = merge_features(filtered, cls, cfg, &result.report);
    (cls == RowClass::PreState ? result.pre_rule : result.post_rule) = std::move(merged);
  }
  return result;
}

std::string RefineReport::to_json() const {
  std::ostringstream out;
  out << "{\"dropped_irrelevant\":[";
  for (std::size_t i = 0; i < dropped_irrelevant.size(); ++i) {
    if (i) out << ",";
    out << "\"" << dropped_irrelevant[i] << "\"";
  }
  out << "],\"conflicts\":[";
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    if (i) out << ",";
    out << "{\"existing\":\"" << conflicts[i].existing << "\",\"incoming\":\""
        << conflicts[i].incoming << "\",\"existing_support\":" << format_number(conflicts[i].existing_support)
        << ",\"incoming_support\":" << format_number(conflicts[i].incoming_support)
        << ",\"decision\":\""
        << (conflicts[i].decision == ConflictDecision::DropBoth ? "drop_both" : "drop_weaker")
        << "\"}";
  }
  out << "],\"empty_antecedent\":" << (empty_antecedent ? "true" : "false") << "}";
  return out.str();
}

}  // namespace planlearn
