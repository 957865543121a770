#include "planlearn/model_synthesis.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "planlearn/errors.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

bool ChangeEvidence::allows_add(const LiftedKey& k) const {
  auto it = became_true.find(k);
  return it == became_true.end() || it->second >= min_share;
}

bool ChangeEvidence::allows_delete(const LiftedKey& k) const {
  auto it = became_false.find(k);
  return it == became_false.end() || it->second >= min_share;
}

bool ChangeEvidence::allows_assign(const LiftedKey& k) const {
  return !restrict_assigns || variant_fluents.count(k) > 0;
}

ActionModel synthesize_action(const Rule& pre_rule, const Rule& post_rule,
                              const std::string& name, int arity,
                              const std::vector<std::pair<FluentDelta, Expression>>& fitted,
                              const ChangeEvidence& evidence) {
  ActionModel model;
  model.name = name;
  model.arity = arity;

  std::map<LiftedKey, bool> pre_logical, post_logical;
  std::map<LiftedKey, double> pre_numeric, post_numeric;
  std::vector<std::pair<ComparisonAttribute, bool>> pre_comparisons;

  auto pin = [](const Rule& rule, std::map<LiftedKey, bool>& logical,
                std::map<LiftedKey, double>& numeric,
                std::vector<std::pair<ComparisonAttribute, bool>>* comparisons) {
    for (const auto& f : rule.antecedent) {
      if (const auto* la = std::get_if<LiftedAttribute>(&f.attr)) {
        if (la->kind == AttrKind::Logical) {
          bool value = std::get<bool>(f.value);
          auto [it, inserted] = logical.emplace(la->key, value);
          assert(inserted && "refined rule pins an attribute twice");
          (void)it;
          (void)inserted;
        } else {
          numeric.emplace(la->key, std::get<double>(f.value));
        }
      } else if (comparisons) {
        comparisons->emplace_back(std::get<ComparisonAttribute>(f.attr), std::get<bool>(f.value));
      }
    }
  };
  pin(pre_rule, pre_logical, pre_numeric, &pre_comparisons);
  pin(post_rule, post_logical, post_numeric, nullptr);

  // Effects: differences between the meta-states, corroborated by observed
  // flips.
  std::set<LiftedKey> add_keys;
  for (const auto& [key, post_value] : post_logical) {
    auto pre_it = pre_logical.find(key);
    bool pre_known = pre_it != pre_logical.end();
    if (post_value && (!pre_known || !pre_it->second)) {
      if (!evidence.allows_add(key)) continue;
      model.effects.push_back(AddEffect{key});
      add_keys.insert(key);
    } else if (!post_value && pre_known && pre_it->second) {
      if (!evidence.allows_delete(key)) continue;
      model.effects.push_back(DeleteEffect{key});
    }
  }

  std::set<LiftedKey> fitted_targets;
  for (const auto& [delta, expr] : fitted) {
    fitted_targets.insert(delta.target);
    NumericEffectKind kind = delta.direction == DeltaDirection::Increase ? NumericEffectKind::Increase
                             : delta.direction == DeltaDirection::Assign
                                 ? NumericEffectKind::Assign
                                 : NumericEffectKind::Decrease;
    model.effects.push_back(NumericEffect{kind, delta.target, expr});
  }

  // A numeric column pinned to a single label after the action, with no
  // fitted change expression and no matching pre pin, is an assignment.
  for (const auto& [key, label] : post_numeric) {
    if (fitted_targets.count(key)) continue;
    auto pre_it = pre_numeric.find(key);
    if (pre_it != pre_numeric.end() && pre_it->second == label) continue;
    if (!evidence.allows_assign(key)) continue;
    model.effects.push_back(
        NumericEffect{NumericEffectKind::Assign, key, Expression::constant(label)});
  }

  // Preconditions from the pre-state meta-state. Numeric pins are used for
  // effect differencing only: numeric requirements surface as relational
  // comparison features, never as centroid equalities.
  for (const auto& [key, value] : pre_logical) {
    if (!value && add_keys.count(key)) continue;  // subsumed by the add effect
    model.preconditions.push_back(LogicalCondition{key, value});
  }
  for (const auto& [attr, value] : pre_comparisons) {
    if (!value) continue;  // the complement comparison is derived separately when informative
    model.preconditions.push_back(
        NumericCondition{attr.cmp, Expression::variable(attr.lhs), attr.rhs});
  }

  std::sort(model.preconditions.begin(), model.preconditions.end(),
            [](const Condition& a, const Condition& b) { return canonical(a) < canonical(b); });
  std::sort(model.effects.begin(), model.effects.end(),
            [](const Effect& a, const Effect& b) { return canonical(a) < canonical(b); });
  return model;
}

namespace {

ActionReport learn_one_action(const std::string& name, const std::vector<Transition>& transitions,
                              const LearnConfig& cfg, ActionModel* out_model, bool* ok) {
  ActionReport report;
  report.action = name;
  report.transitions = static_cast<int>(transitions.size());
  *ok = false;

  int arity = transitions.empty() ? 0 : static_cast<int>(transitions[0].action.args.size());
  report.arity = arity;

  Dataset dataset = build_dataset(name, arity, transitions);
  report.rows = static_cast<int>(dataset.rows.size());

  if (!cfg.skip_filters) {
    LogicalFilterStats lstats;
    dataset = filter_logical_noise(std::move(dataset), cfg.filter, &lstats);
    report.logical_erased = lstats.erased_cells;

    DiscretisationReport dreport;
    dataset = discretise_fluents(std::move(dataset), cfg.filter, &dreport);
    for (const auto& [attr, rep] : dreport.by_attribute) {
      report.numeric_outliers += static_cast<int>(rep.outliers.size());
      report.clusters += static_cast<int>(rep.clusters.size());
    }
  }

  // Change evidence: how often each literal actually flipped, and which
  // fluents evolve. Gates the effect synthesis against class skews.
  ChangeEvidence evidence;
  evidence.restrict_assigns = true;
  evidence.min_share = cfg.regression.change_fraction;
  for (std::size_t col = 0; col < dataset.attributes.size(); ++col) {
    const auto* la = std::get_if<LiftedAttribute>(&dataset.attributes[col]);
    if (!la || la->kind != AttrKind::Logical) continue;
    std::size_t observed = 0, became_true = 0, became_false = 0;
    for (std::size_t i = 0; i + 1 < dataset.rows.size(); i += 2) {
      const Cell& pre = dataset.rows[i].cells[col];
      const Cell& post = dataset.rows[i + 1].cells[col];
      if (pre.is_missing() || post.is_missing()) continue;
      ++observed;
      if (!pre.as_logical() && post.as_logical()) ++became_true;
      if (pre.as_logical() && !post.as_logical()) ++became_false;
    }
    if (observed == 0) continue;
    evidence.became_true[la->key] = static_cast<double>(became_true) / observed;
    evidence.became_false[la->key] = static_cast<double>(became_false) / observed;
  }

  auto deltas = detect_variant_fluents(dataset, cfg.regression);
  std::vector<std::pair<FluentDelta, Expression>> fitted;
  for (const auto& delta : deltas) {
    report.variants.push_back({to_string(delta.target), to_string(delta.direction),
                               static_cast<int>(delta.pairs.size())});
    evidence.variant_fluents.insert(delta.target);
    if (delta.pairs.size() < 2) continue;
    if (delta.direction == DeltaDirection::Mixed) continue;
    if (auto fit = fit_expression(dataset, delta, cfg.regression)) {
      report.fits.push_back({to_string(delta.target), fit->expr.render(), fit->score,
                             fit->expansions});
      fitted.emplace_back(delta, fit->expr);
    }
  }

  auto features = derive_relational_features(dataset, fitted, cfg.regression.uniformity);
  for (const auto& f : features) report.features.push_back(attribute_name(AttributeId{f}));
  dataset = extend_dataset(std::move(dataset), features);
  report.attributes = static_cast<int>(dataset.attributes.size());

  RuleSet rules = learn_rules(dataset, cfg.rule_purity, cfg.closure_uniformity);
  for (const auto& r : rules.rules)
    (r.consequent == RowClass::PreState ? report.rules_pre : report.rules_post)++;

  Rule pre_rule, post_rule;
  if (cfg.skip_refinement) {
    // Vanilla behaviour: the heaviest rule per class is the meta-state.
    bool have_pre = false, have_post = false;
    for (const auto& r : rules.rules) {
      Rule& slot = r.consequent == RowClass::PreState ? pre_rule : post_rule;
      bool& have = r.consequent == RowClass::PreState ? have_pre : have_post;
      if (!have || r.weight > slot.weight) {
        slot = r;
        have = true;
      }
    }
    if (!have_pre || !have_post)
      throw PipelineError("no rule learned for one of the classes of action " + name);
  } else {
    RefineResult refined = refine(rules, cfg.refine);
    pre_rule = std::move(refined.pre_rule);
    post_rule = std::move(refined.post_rule);
    report.refine_dropped = static_cast<int>(refined.report.dropped_irrelevant.size());
    report.refine_conflicts = static_cast<int>(refined.report.conflicts.size());
  }

  *out_model = synthesize_action(pre_rule, post_rule, name, arity, fitted, evidence);
  report.preconditions = static_cast<int>(out_model->preconditions.size());
  report.effects = static_cast<int>(out_model->effects.size());
  *ok = true;
  return report;
}

}  // namespace

LearnResult learn_domain(const std::vector<PlanTrace>& traces, const LearnConfig& cfg) {
  if (traces.empty()) throw PipelineError("learn_domain: no traces given");

  auto groups = group_transitions(traces);
  std::vector<std::pair<std::string, const std::vector<Transition>*>> work;
  for (const auto& [name, transitions] : groups) work.emplace_back(name, &transitions);

  std::vector<ActionReport> reports(work.size());
  std::vector<ActionModel> models(work.size());
  std::vector<char> ok(work.size(), 0);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end && i < work.size(); ++i) {
      try {
        bool success = false;
        reports[i] = learn_one_action(work[i].first, *work[i].second, cfg, &models[i], &success);
        ok[i] = success;
      } catch (const Error& e) {
        reports[i].action = work[i].first;
        reports[i].error = e.what();
        ok[i] = 0;
      }
    }
  };

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || work.size() <= 1) {
    run_range(0, work.size());
  } else {
    std::size_t n_threads = std::min<std::size_t>(jobs, work.size());
    std::size_t chunk = (work.size() + n_threads - 1) / n_threads;
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t)
      threads.emplace_back(run_range, t * chunk, (t + 1) * chunk);
    for (auto& t : threads) t.join();
  }

  LearnResult result;
  result.domain.name = cfg.domain_name;
  for (std::size_t i = 0; i < work.size(); ++i)
    if (ok[i]) result.domain.actions.push_back(std::move(models[i]));
  result.report.actions = std::move(reports);
  return result;
}

std::string LearnReport::to_json() const {
  std::ostringstream out;
  out << "{\"actions\":[";
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    if (i) out << ",";
    out << "{\"action\":\"" << json_escape(a.action) << "\""
        << ",\"arity\":" << a.arity << ",\"transitions\":" << a.transitions
        << ",\"rows\":" << a.rows << ",\"attributes\":" << a.attributes
        << ",\"logical_erased\":" << a.logical_erased
        << ",\"numeric_outliers\":" << a.numeric_outliers << ",\"clusters\":" << a.clusters
        << ",\"variants\":[";
    for (std::size_t v = 0; v < a.variants.size(); ++v) {
      if (v) out << ",";
      out << "{\"target\":\"" << json_escape(a.variants[v].target) << "\",\"direction\":\""
          << a.variants[v].direction << "\",\"pairs\":" << a.variants[v].pairs << "}";
    }
    out << "],\"fits\":[";
    for (std::size_t f = 0; f < a.fits.size(); ++f) {
      if (f) out << ",";
      out << "{\"target\":\"" << json_escape(a.fits[f].target) << "\",\"expression\":\""
          << json_escape(a.fits[f].expression) << "\",\"score\":" << format_number(a.fits[f].score)
          << ",\"expansions\":" << a.fits[f].expansions << "}";
    }
    out << "],\"features\":[";
    for (std::size_t f = 0; f < a.features.size(); ++f) {
      if (f) out << ",";
      out << "\"" << json_escape(a.features[f]) << "\"";
    }
    out << "],\"rules_pre\":" << a.rules_pre << ",\"rules_post\":" << a.rules_post
        << ",\"refine_dropped\":" << a.refine_dropped
        << ",\"refine_conflicts\":" << a.refine_conflicts
        << ",\"preconditions\":" << a.preconditions << ",\"effects\":" << a.effects
        << ",\"error\":\"" << json_escape(a.error) << "\"}";
  }
  out << "]}";
  return out.str();
}

}  // namespace planlearn
