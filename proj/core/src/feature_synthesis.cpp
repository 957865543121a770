#include "planlearn/feature_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "planlearn/errors.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

std::string to_string(DeltaDirection d) {
  switch (d) {
    case DeltaDirection::Increase: return "increase";
    case DeltaDirection::Decrease: return "decrease";
    case DeltaDirection::Assign: return "assign";
    case DeltaDirection::Mixed: return "mixed";
  }
  return "?";
}

std::vector<FluentDelta> detect_variant_fluents(const Dataset& d, const RegressionConfig& cfg) {
  std::vector<FluentDelta> out;
  for (std::size_t col = 0; col < d.attributes.size(); ++col) {
    const auto* la = std::get_if<LiftedAttribute>(&d.attributes[col]);
    if (!la || la->kind != AttrKind::Numeric) continue;

    FluentDelta delta;
    delta.target = la->key;
    std::size_t changed = 0;
    for (std::size_t i = 0; i + 1 < d.rows.size(); i += 2) {
      const Cell& pre = d.rows[i].cells[col];
      const Cell& post = d.rows[i + 1].cells[col];
      if (pre.is_missing() || post.is_missing()) continue;
      DeltaPair pair{i, pre.as_numeric(), post.as_numeric()};
      if (pair.pre_value != pair.post_value) ++changed;
      delta.pairs.push_back(pair);
    }
    if (delta.pairs.empty() || changed == 0) continue;
    if (static_cast<double>(changed) / delta.pairs.size() < cfg.change_fraction) continue;

    const double needed = 1.0 - cfg.noise_tolerance;
    const double n_pairs = static_cast<double>(delta.pairs.size());

    // An action that (almost) always leaves the same value behind is an
    // assignment, whatever the sign of the individual changes.
    std::map<double, std::size_t> post_tally;
    for (const auto& p : delta.pairs) post_tally[p.post_value]++;
    std::size_t post_majority = 0;
    for (const auto& [value, count] : post_tally) post_majority = std::max(post_majority, count);
    bool post_constant =
        delta.pairs.size() >= 2 && static_cast<double>(post_majority) >= needed * n_pairs;

    std::size_t down = 0, up = 0;
    for (const auto& p : delta.pairs) {
      if (p.pre_value == p.post_value) continue;
      (p.post_value < p.pre_value ? down : up)++;
    }

    if (post_constant)
      delta.direction = DeltaDirection::Assign;
    else if (static_cast<double>(down) >= needed * n_pairs)
      delta.direction = DeltaDirection::Decrease;
    else if (static_cast<double>(up) >= needed * n_pairs)
      delta.direction = DeltaDirection::Increase;
    else
      delta.direction = DeltaDirection::Mixed;
    out.push_back(std::move(delta));
  }
  return out;
}

namespace {

// Indexes the numeric columns once so expression evaluation per row is a
// map lookup instead of a column scan.
class NumericView {
 public:
  explicit NumericView(const Dataset& d) : d_(&d) {
    for (std::size_t col = 0; col < d.attributes.size(); ++col) {
      const auto* la = std::get_if<LiftedAttribute>(&d.attributes[col]);
      if (la && la->kind == AttrKind::Numeric) index_.emplace(la->key, col);
    }
  }

  std::optional<double> eval(const Expression& e, std::size_t row) const {
    return e.evaluate([&](const LiftedKey& key) -> std::optional<double> {
      auto it = index_.find(key);
      if (it == index_.end()) return std::nullopt;
      const Cell& cell = d_->rows[row].cells[it->second];
      if (cell.is_missing()) return std::nullopt;
      return cell.as_numeric();
    });
  }

  std::vector<LiftedKey> keys() const {
    std::vector<LiftedKey> out;
    for (const auto& [key, col] : index_) out.push_back(key);
    return out;
  }

 private:
  const Dataset* d_;
  std::map<LiftedKey, std::size_t> index_;
};

// Frontier order: smaller expressions first, best score within a size layer.
// Layering keeps the search from burrowing into deep chains that approximate
// the target before the small candidates that hit it exactly are generated,
// and makes the returned expression minimal-size among acceptable ones.
struct SearchNode {
  double score;
  int size;
  std::string canon;
  Expression expr;

  bool operator<(const SearchNode& o) const {
    if (size != o.size) return size < o.size;
    if (score != o.score) return score < o.score;
    return canon < o.canon;
  }
};

bool compare_cells(Comparator cmp, double a, double b) {
  switch (cmp) {
    case Comparator::Ge: return a >= b;
    case Comparator::Le: return a <= b;
    case Comparator::Gt: return a > b;
    case Comparator::Lt: return a < b;
    case Comparator::Eq: return a == b;
  }
  return false;
}

}  // namespace

std::optional<FitResult> fit_expression(const Dataset& d, const FluentDelta& delta,
                                        const RegressionConfig& cfg,
                                        std::ostream* search_trace) {
  if (delta.pairs.size() < 2)
    throw PipelineError("fit_expression needs at least 2 pairs for " + to_string(delta.target));
  if (delta.direction == DeltaDirection::Mixed) return std::nullopt;

  // Increase/decrease effects are fitted to the change magnitude |post-pre|;
  // assignments are fitted to the post value itself.
  NumericView view(d);
  std::vector<double> magnitudes;
  magnitudes.reserve(delta.pairs.size());
  for (const auto& p : delta.pairs)
    magnitudes.push_back(delta.direction == DeltaDirection::Assign
                             ? p.post_value
                             : std::fabs(p.post_value - p.pre_value));

  // Trimmed mean of the normalized absolute error against the change
  // magnitude: pairs carrying residual noise (or left unevaluable by erased
  // cells) would otherwise veto an otherwise exact expression, so the worst
  // noise_tolerance share of pairs is dropped before averaging.
  const std::size_t trim =
      static_cast<std::size_t>(cfg.noise_tolerance * static_cast<double>(delta.pairs.size()));
  std::vector<double> errs(delta.pairs.size());
  auto score_of = [&](const Expression& e) -> double {
    for (std::size_t i = 0; i < delta.pairs.size(); ++i) {
      auto v = view.eval(e, delta.pairs[i].pre_row);
      errs[i] = v ? std::fabs(*v - magnitudes[i]) / std::max(1.0, magnitudes[i])
                  : std::numeric_limits<double>::infinity();
    }
    std::size_t kept = errs.size() - trim;
    std::nth_element(errs.begin(), errs.begin() + (kept - 1), errs.end());
    double total = 0;
    for (std::size_t i = 0; i < kept; ++i) total += errs[i];
    return total / static_cast<double>(kept);
  };

  // Assignments land on a (near-)constant value by construction, so their
  // search space is the constant compositions; change magnitudes draw on the
  // full attribute set.
  std::vector<Expression> seeds;
  if (delta.direction != DeltaDirection::Assign)
    for (const auto& key : view.keys()) seeds.push_back(Expression::variable(key));
  {
    std::set<long long> pool(cfg.constant_pool.begin(), cfg.constant_pool.end());
    for (long long c : pool) seeds.push_back(Expression::constant(static_cast<double>(c)));
  }

  // The budget counts scored candidates, the unit of work dominating the
  // search; kExpansionsPerSecond calibrates it against cfg.timeout_seconds.
  const long long budget = std::max<long long>(
      1, static_cast<long long>(cfg.timeout_seconds * kExpansionsPerSecond));
  long long scored = 0;

  std::set<SearchNode> frontier;
  std::set<std::string> seen;
  auto push = [&](Expression e) {
    std::string canon = e.canonical();
    if (!seen.insert(canon).second) return;
    ++scored;
    double s = score_of(e);
    if (!std::isfinite(s)) return;
    frontier.insert(SearchNode{s, e.size(), std::move(canon), std::move(e)});
  };
  for (const auto& seed : seeds) push(seed);

  double best_seen = std::numeric_limits<double>::infinity();
  while (!frontier.empty() && scored < budget) {
    SearchNode node = *frontier.begin();
    frontier.erase(frontier.begin());
    if (search_trace && node.score < best_seen) {
      best_seen = node.score;
      *search_trace << "best " << format_number(node.score) << " size " << node.size << " "
                    << node.expr.render() << "\n";
    }
    if (node.score <= cfg.acceptance_threshold) {
      // Fold variable-free expressions: (* (* 10 10) 5) is the constant 500.
      if (auto folded = node.expr.evaluate(
              [](const LiftedKey&) -> std::optional<double> { return std::nullopt; });
          folded && node.expr.kind() != Expression::Kind::Constant)
        return FitResult{Expression::constant(*folded), node.score, scored};
      return FitResult{node.expr, node.score, scored};
    }
    if (node.size + 2 > cfg.max_expression_size) continue;
    for (BinOp op : {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div}) {
      for (const auto& seed : seeds) {
        push(Expression::binary(op, node.expr, seed));
        if (scored >= budget) break;
      }
      if (scored >= budget) break;
    }
  }
  return std::nullopt;
}

std::vector<ComparisonAttribute> derive_relational_features(
    const Dataset& d, const std::vector<std::pair<FluentDelta, Expression>>& fitted,
    double uniformity) {
  NumericView view(d);
  auto numeric_keys = view.keys();

  // Candidate right-hand sides: fitted change expressions, then plain
  // attributes. Assigned-value fits are absolute levels, not magnitudes, and
  // make no sense on the right of a comparison.
  std::vector<Expression> rhs_pool;
  std::set<std::string> rhs_seen;
  for (const auto& [delta, expr] : fitted) {
    if (delta.direction == DeltaDirection::Assign) continue;
    if (rhs_seen.insert(expr.canonical()).second) rhs_pool.push_back(expr);
  }
  for (const auto& key : numeric_keys) {
    Expression v = Expression::variable(key);
    if (rhs_seen.insert(v.canonical()).second) rhs_pool.push_back(v);
  }

  std::vector<ComparisonAttribute> kept;
  std::set<std::string> kept_names;
  for (const auto& lhs : numeric_keys) {
    auto lhs_idx = d.attribute_index(to_string(lhs));
    for (const auto& rhs : rhs_pool) {
      if (rhs.kind() == Expression::Kind::Variable) {
        if (rhs.key() == lhs) continue;  // x cmp x
        // Attribute-vs-attribute pairs are oriented: (a >= b) and (b <= a)
        // are the same statement, so only the ordered form is generated.
        if (rhs.key() < lhs) continue;
      }
      for (Comparator cmp : {Comparator::Ge, Comparator::Le, Comparator::Eq}) {
        std::size_t pre_obs = 0, pre_true = 0, all_obs = 0, all_true = 0;
        for (std::size_t r = 0; r < d.rows.size(); ++r) {
          const Cell& cell = d.rows[r].cells[*lhs_idx];
          if (cell.is_missing()) continue;
          auto rv = view.eval(rhs, r);
          if (!rv) continue;
          bool truth = compare_cells(cmp, cell.as_numeric(), *rv);
          ++all_obs;
          all_true += truth;
          if (d.rows[r].cls == RowClass::PreState) {
            ++pre_obs;
            pre_true += truth;
          }
        }
        if (pre_obs == 0) continue;
        // Trivial unless both truth values are attested (at least three rows
        // each): a stray corrupted reading, which surfaces in at most two
        // rows per state, cannot turn an invariant into a feature.
        std::size_t minority = std::min(all_true, all_obs - all_true);
        if (minority < 3) continue;
        double ratio = static_cast<double>(pre_true) / pre_obs;
        if (ratio < uniformity && 1.0 - ratio < uniformity) continue;

        ComparisonAttribute attr{cmp, lhs, rhs};
        if (kept_names.insert(attribute_name(AttributeId{attr})).second)
          kept.push_back(std::move(attr));
      }
    }
  }
  std::sort(kept.begin(), kept.end(),
            [](const ComparisonAttribute& a, const ComparisonAttribute& b) {
              return attribute_name(AttributeId{a}) < attribute_name(AttributeId{b});
            });
  return kept;
}

Dataset extend_dataset(Dataset d, const std::vector<ComparisonAttribute>& features) {
  for (const auto& feat : features) {
    AttributeId id{feat};
    if (d.attribute_index(attribute_name(id))) continue;  // already present
    NumericView view(d);
    auto lhs_idx = d.attribute_index(to_string(feat.lhs));
    d.attributes.push_back(id);
    for (std::size_t r = 0; r < d.rows.size(); ++r) {
      Cell cell = Cell::missing();
      if (lhs_idx && !d.rows[r].cells[*lhs_idx].is_missing()) {
        auto rv = view.eval(feat.rhs, r);
        if (rv)
          cell = Cell::logical(compare_cells(feat.cmp, d.rows[r].cells[*lhs_idx].as_numeric(), *rv));
      }
      d.rows[r].cells.push_back(cell);
    }
  }
  return d;
}

}  // namespace planlearn
