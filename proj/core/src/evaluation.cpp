#include "planlearn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "planlearn/errors.hpp"
#include "planlearn/rng.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

// ---------------------------------------------------------------------------
// Noise injection

NoiseSpec::Kind noise_kind_from_string(const std::string& s) {
  if (s == "logical-outlier") return NoiseSpec::Kind::LogicalOutlier;
  if (s == "numeric-outlier") return NoiseSpec::Kind::NumericOutlier;
  if (s == "numeric-random") return NoiseSpec::Kind::NumericRandom;
  if (s == "mixed") return NoiseSpec::Kind::Mixed;
  throw PipelineError("unknown noise kind: " + s);
}

std::string to_string(NoiseSpec::Kind k) {
  switch (k) {
    case NoiseSpec::Kind::LogicalOutlier: return "logical-outlier";
    case NoiseSpec::Kind::NumericOutlier: return "numeric-outlier";
    case NoiseSpec::Kind::NumericRandom: return "numeric-random";
    case NoiseSpec::Kind::Mixed: return "mixed";
  }
  return "?";
}

namespace {

struct Slot {
  std::size_t trace, state;
  bool is_literal;
  GroundAtom atom;
};

}  // namespace

std::vector<PlanTrace> inject_noise(std::vector<PlanTrace> traces, const NoiseSpec& spec) {
  const bool want_literals = spec.kind == NoiseSpec::Kind::LogicalOutlier ||
                             spec.kind == NoiseSpec::Kind::Mixed;
  const bool want_fluents = spec.kind != NoiseSpec::Kind::LogicalOutlier;

  std::vector<Slot> slots;
  std::map<std::string, std::pair<double, double>> fluent_range;  // name -> (min, max)
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (std::size_t s = 0; s < traces[t].states.size(); ++s) {
      const State& state = traces[t].states[s];
      if (want_literals)
        for (const auto& [atom, truth] : state.literals) slots.push_back({t, s, true, atom});
      for (const auto& [atom, value] : state.fluents) {
        if (want_fluents) slots.push_back({t, s, false, atom});
        auto [it, inserted] = fluent_range.try_emplace(atom.name, value, value);
        it->second.first = std::min(it->second.first, value);
        it->second.second = std::max(it->second.second, value);
      }
    }
  }

  std::size_t count = static_cast<std::size_t>(
      std::ceil(spec.percentage * static_cast<double>(slots.size())));
  count = std::min(count, slots.size());
  if (count == 0) return traces;

  auto rng = rng_for(spec.seed, "inject-noise");
  // Partial Fisher-Yates: the first `count` entries become the sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, slots.size() - 1);
    std::swap(slots[i], slots[pick(rng)]);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const Slot& slot = slots[i];
    State& state = traces[slot.trace].states[slot.state];
    if (slot.is_literal) {
      auto it = state.literals.find(slot.atom);
      it->second = !it->second;
      continue;
    }
    bool as_outlier;
    switch (spec.kind) {
      case NoiseSpec::Kind::NumericOutlier: as_outlier = true; break;
      case NoiseSpec::Kind::NumericRandom: as_outlier = false; break;
      default: as_outlier = unit(rng) < 0.5; break;
    }
    auto it = state.fluents.find(slot.atom);
    if (as_outlier) {
      auto [lo, hi] = fluent_range.at(slot.atom.name);
      double range = hi - lo;
      if (range == 0) range = 1;
      std::uniform_real_distribution<double> wild(lo - 10 * range, hi + 10 * range);
      double v = wild(rng);
      if (unit(rng) < 0.5) v = -v;
      it->second = v;
    } else {
      std::uniform_real_distribution<double> jitter(-0.1, 0.1);
      it->second = it->second * (1.0 + jitter(rng));
    }
  }
  return traces;
}

// ---------------------------------------------------------------------------
// Metrics

Metrics Metrics::from_counts(long long tp, long long fp, long long fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  m.fscore = (m.precision + m.recall) > 0
                 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                 : 0.0;
  return m;
}

namespace {

std::set<std::string> model_elements(const ActionModel& m) {
  std::set<std::string> out;
  for (const auto& c : m.preconditions) out.insert(canonical(c));
  for (const auto& e : m.effects) out.insert(canonical(e));
  return out;
}

}  // namespace

Metrics score_model(const ActionModel& learned, const ActionModel& reference) {
  if (learned.arity != reference.arity)
    throw PipelineError("score_model: arity mismatch for action " + reference.name);
  auto l = model_elements(learned);
  auto r = model_elements(reference);
  long long tp = 0;
  for (const auto& e : l) tp += r.count(e);
  return Metrics::from_counts(tp, static_cast<long long>(l.size()) - tp,
                              static_cast<long long>(r.size()) - tp);
}

DomainScore score_domain(const Domain& learned, const Domain& reference) {
  DomainScore score;
  double p = 0, r = 0, f = 0;
  for (const auto& ref_action : reference.actions) {
    Metrics m;
    if (const ActionModel* l = learned.find(ref_action.name)) {
      m = score_model(*l, ref_action);
    } else {
      m = Metrics::from_counts(0, 0,
                               static_cast<long long>(model_elements(ref_action).size()));
    }
    p += m.precision;
    r += m.recall;
    f += m.fscore;
    score.per_action.emplace(ref_action.name, m);
  }
  if (!reference.actions.empty()) {
    double n = static_cast<double>(reference.actions.size());
    score.precision = p / n;
    score.recall = r / n;
    score.fscore = f / n;
  }
  return score;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

GroundAtom ground(const LiftedKey& key, const ActionInstance& a) {
  GroundAtom atom;
  atom.name = key.name;
  for (int p : key.params) {
    if (p < 0 || p >= static_cast<int>(a.args.size()))
      throw ReplayError("parameter ?arg" + std::to_string(p) + " out of range for " +
                        to_string(a));
    atom.args.push_back(a.args[p]);
  }
  return atom;
}

std::optional<double> eval_grounded(const Expression& e, const State& s,
                                    const ActionInstance& a, bool strict,
                                    std::string* missing) {
  return e.evaluate([&](const LiftedKey& key) -> std::optional<double> {
    GroundAtom atom = ground(key, a);
    auto it = s.fluents.find(atom);
    if (it == s.fluents.end()) {
      if (missing) *missing = to_string(atom);
      if (strict) throw ReplayError("unbound fluent " + to_string(atom));
      return std::nullopt;
    }
    return it->second;
  });
}

bool numeric_holds(Comparator cmp, double a, double b) {
  switch (cmp) {
    case Comparator::Ge: return a >= b;
    case Comparator::Le: return a <= b;
    case Comparator::Gt: return a > b;
    case Comparator::Lt: return a < b;
    case Comparator::Eq: return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
  }
  return false;
}

bool fluents_close(double a, double b) {
  return std::fabs(a - b) <= 1e-6 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

bool condition_holds(const Condition& c, const State& s, const ActionInstance& a, bool strict) {
  if (const auto* lc = std::get_if<LogicalCondition>(&c)) {
    GroundAtom atom = ground(lc->key, a);
    auto it = s.literals.find(atom);
    if (it == s.literals.end()) return false;  // unknown is never satisfied
    return it->second == lc->truth;
  }
  const auto& nc = std::get<NumericCondition>(c);
  auto lhs = eval_grounded(nc.lhs, s, a, strict, nullptr);
  if (!lhs) return false;
  auto rhs = eval_grounded(nc.rhs, s, a, strict, nullptr);
  if (!rhs) return false;
  return numeric_holds(nc.cmp, *lhs, *rhs);
}

State apply_action(const ActionModel& m, const ActionInstance& a, const State& s) {
  // Evaluate all numeric amounts against the incoming state first: effects
  // are simultaneous.
  std::vector<std::pair<GroundAtom, double>> numeric_updates;
  for (const auto& e : m.effects) {
    if (const auto* ne = std::get_if<NumericEffect>(&e)) {
      auto amount = eval_grounded(ne->amount, s, a, true, nullptr);
      if (!amount) throw ReplayError("cannot evaluate effect amount in " + to_string(a));
      GroundAtom target = ground(ne->target, a);
      double current = 0;
      if (ne->kind != NumericEffectKind::Assign) {
        auto it = s.fluents.find(target);
        if (it == s.fluents.end())
          throw ReplayError("unbound fluent " + to_string(target) + " updated by " + to_string(a));
        current = it->second;
      }
      double next = ne->kind == NumericEffectKind::Increase   ? current + *amount
                    : ne->kind == NumericEffectKind::Decrease ? current - *amount
                                                              : *amount;
      numeric_updates.emplace_back(std::move(target), next);
    }
  }

  State out = s;
  out.index = s.index + 1;
  for (const auto& e : m.effects) {
    if (const auto* add = std::get_if<AddEffect>(&e))
      out.literals[ground(add->key, a)] = true;
    else if (const auto* del = std::get_if<DeleteEffect>(&e))
      out.literals[ground(del->key, a)] = false;
  }
  for (auto& [atom, value] : numeric_updates) out.fluents[atom] = value;
  return out;
}

ReplayResult replay_validate(const Domain& d, const PlanTrace& trace) {
  if (trace.states.empty()) return {true, "", -1};

  State current = trace.states[0];
  ReplayResult divergence{true, "", -1};

  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    const ActionInstance& act = trace.actions[i];
    const ActionModel* model = d.find(act.name);
    if (!model) throw ReplayError("unknown action " + act.name);

    for (const auto& c : model->preconditions) {
      if (!condition_holds(c, current, act, /*strict=*/true)) {
        return {false,
                "precondition unsatisfied at action " + std::to_string(i) + " " + to_string(act) +
                    ": " + render(c, ParamStyle::Internal),
                static_cast<int>(i)};
      }
    }
    current = apply_action(*model, act, current);

    // Track the first recorded state the simulation diverges from; only the
    // final state decides validity, but the first divergence is the most
    // useful detail to report.
    if (divergence.ok) {
      const State& recorded = trace.states[i + 1];
      for (const auto& [atom, truth] : recorded.literals) {
        auto it = current.literals.find(atom);
        if (it == current.literals.end() || it->second != truth) {
          divergence = {false,
                        "literal mismatch " + to_string(atom) + " after step " + std::to_string(i),
                        static_cast<int>(i)};
          break;
        }
      }
      if (divergence.ok) {
        for (const auto& [atom, value] : recorded.fluents) {
          auto it = current.fluents.find(atom);
          if (it == current.fluents.end() || !fluents_close(it->second, value)) {
            divergence = {false,
                          "fluent mismatch " + to_string(atom) + " after step " +
                              std::to_string(i) + ": got " +
                              (it == current.fluents.end() ? std::string("<unbound>")
                                                           : format_number(it->second)) +
                              " expected " + format_number(value),
                          static_cast<int>(i)};
            break;
          }
        }
      }
    }
  }

  // Validity is judged on the final state only.
  const State& final_state = trace.states.back();
  for (const auto& [atom, truth] : final_state.literals) {
    auto it = current.literals.find(atom);
    if (it == current.literals.end() || it->second != truth)
      return divergence.ok ? ReplayResult{false, "final literal mismatch " + to_string(atom),
                                          static_cast<int>(trace.actions.size())}
                           : divergence;
  }
  for (const auto& [atom, value] : final_state.fluents) {
    auto it = current.fluents.find(atom);
    if (it == current.fluents.end() || !fluents_close(it->second, value))
      return divergence.ok ? ReplayResult{false, "final fluent mismatch " + to_string(atom),
                                          static_cast<int>(trace.actions.size())}
                           : divergence;
  }
  return {true, "", -1};
}

// ---------------------------------------------------------------------------
// Cross-validation

FoldReport cross_validate(const std::vector<PlanTrace>& traces, int k, const LearnConfig& cfg,
                          const std::optional<NoiseSpec>& noise, const Domain* reference,
                          std::uint64_t seed) {
  if (k < 2) throw PipelineError("cross_validate: k must be at least 2");
  if (static_cast<int>(traces.size()) < k)
    throw PipelineError("cross_validate: need at least k traces (k=" + std::to_string(k) +
                        ", n=" + std::to_string(traces.size()) + ")");

  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = rng_for(seed, "xval-shuffle");
  std::shuffle(order.begin(), order.end(), rng);

  FoldReport report;
  double p = 0, r = 0, f = 0;
  for (int fold = 0; fold < k; ++fold) {
    std::size_t begin = fold * traces.size() / k;
    std::size_t end = (fold + 1) * traces.size() / k;

    std::vector<PlanTrace> train, test;
    for (std::size_t i = 0; i < order.size(); ++i)
      (i >= begin && i < end ? test : train).push_back(traces[order[i]]);

    if (noise) {
      NoiseSpec fold_spec = *noise;
      fold_spec.seed = noise->seed * 1000003ull + static_cast<std::uint64_t>(fold);
      train = inject_noise(std::move(train), fold_spec);
    }

    FoldResult result;
    result.fold = fold;
    LearnResult learned = learn_domain(train, cfg);
    if (reference) {
      result.scored = true;
      result.score = score_domain(learned.domain, *reference);
    }
    for (const auto& t : test) {
      try {
        ReplayResult rr = replay_validate(learned.domain, t);
        if (!rr.ok) {
          result.valid = false;
          result.validity_detail = rr.detail;
          break;
        }
      } catch (const Error& e) {
        result.valid = false;
        result.validity_detail = e.what();
        break;
      }
    }
    p += result.score.precision;
    r += result.score.recall;
    f += result.score.fscore;
    report.all_valid = report.all_valid && result.valid;
    report.folds.push_back(std::move(result));
  }
  report.mean_precision = p / k;
  report.mean_recall = r / k;
  report.mean_fscore = f / k;
  return report;
}

std::string FoldReport::to_json() const {
  std::ostringstream out;
  out << "{\"folds\":[";
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto& fr = folds[i];
    if (i) out << ",";
    out << "{\"fold\":" << fr.fold << ",\"scored\":" << (fr.scored ? "true" : "false")
        << ",\"precision\":" << format_number(fr.score.precision)
        << ",\"recall\":" << format_number(fr.score.recall)
        << ",\"fscore\":" << format_number(fr.score.fscore) << ",\"per_action\":{";
    bool first = true;
    for (const auto& [name, m] : fr.score.per_action) {
      if (!first) out << ",";
      first = false;
      out << "\"" << name << "\":{\"tp\":" << m.tp << ",\"fp\":" << m.fp << ",\"fn\":" << m.fn
          << ",\"precision\":" << format_number(m.precision)
          << ",\"recall\":" << format_number(m.recall)
          << ",\"fscore\":" << format_number(m.fscore) << "}";
    }
    out << "},\"valid\":" << (fr.valid ? "true" : "false") << ",\"validity_detail\":\"";
    for (char c : fr.validity_detail) {
      if (c == '"' || c == '\\') out << '\\';
      out << c;
    }
    out << "\"}";
  }
  out << "],\"mean_precision\":" << format_number(mean_precision)
      << ",\"mean_recall\":" << format_number(mean_recall)
      << ",\"mean_fscore\":" << format_number(mean_fscore)
      << ",\"all_valid\":" << (all_valid ? "true" : "false") << "}";
  return out.str();
}

// ---------------------------------------------------------------------------
// Trace generation

std::vector<ActionInstance> applicable_actions(const Domain& d, const State& s,
                                               const std::vector<std::string>& objects,
                                               const GeneratorWorld* policy_world) {
  std::vector<const ActionModel*> models;
  for (const auto& m : d.actions) models.push_back(&m);
  std::sort(models.begin(), models.end(),
            [](const ActionModel* a, const ActionModel* b) { return a->name < b->name; });

  std::vector<ActionInstance> out;
  for (const ActionModel* m : models) {
    std::vector<std::size_t> tuple(m->arity, 0);
    std::vector<bool> used(objects.size(), false);

    // Depth-first enumeration of distinct-argument tuples in object order.
    std::function<void(int)> visit = [&](int depth) {
      if (depth == m->arity) {
        ActionInstance act;
        act.name = m->name;
        for (int i = 0; i < m->arity; ++i) act.args.push_back(objects[tuple[i]]);
        for (const auto& c : m->preconditions)
          if (!condition_holds(c, s, act, /*strict=*/false)) return;
        if (policy_world && policy_world->policy && !policy_world->policy(act, s)) return;
        act.start = s.index;
        act.end = s.index + 1;
        out.push_back(std::move(act));
        return;
      }
      for (std::size_t o = 0; o < objects.size(); ++o) {
        if (used[o]) continue;
        used[o] = true;
        tuple[depth] = o;
        visit(depth + 1);
        used[o] = false;
      }
    };
    visit(0);
  }
  return out;
}

std::vector<PlanTrace> generate_traces(const GeneratorWorld& world, int n, std::uint64_t seed) {
  std::vector<PlanTrace> traces;
  traces.reserve(std::max(0, n));
  for (int t = 0; t < n; ++t) {
    auto rng = rng_for(seed, world.name + ":trace" + std::to_string(t));
    PlanTrace trace;
    State state = world.sample_initial(rng);
    state.index = 0;
    trace.states.push_back(state);

    std::uniform_int_distribution<int> len_dist(world.min_len, std::max(world.min_len, world.max_len));
    int target_len = len_dist(rng);
    for (int step = 0; step < target_len; ++step) {
      auto candidates = applicable_actions(world.reference, state, world.objects, &world);
      if (candidates.empty()) {
        if (step >= world.min_len) break;
        throw PipelineError("dead end in world '" + world.name + "' at step " +
                            std::to_string(step) + " (trace " + std::to_string(t) + ")");
      }
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      ActionInstance act = candidates[pick(rng)];
      const ActionModel* model = world.reference.find(act.name);
      state = apply_action(*model, act, state);
      trace.actions.push_back(std::move(act));
      trace.states.push_back(state);
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace planlearn
