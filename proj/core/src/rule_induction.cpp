#include "planlearn/rule_induction.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "planlearn/errors.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

std::string Feature::value_string() const {
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "True" : "False";
  return format_number(std::get<double>(value));
}

std::string to_string(const Feature& f) {
  return attribute_name(f.attr) + "=" + f.value_string();
}

std::string feature_key(const Feature& f) { return to_string(f); }

std::string feature_conflict_key(const Feature& f) {
  if (const auto* ca = std::get_if<ComparisonAttribute>(&f.attr))
    return "C " + to_string(ca->lhs) + " " + to_string(ca->cmp);
  return "L " + attribute_name(f.attr);
}

bool satisfies(const Row& row, const Feature& f, const Dataset& d) {
  auto idx = d.attribute_index(attribute_name(f.attr));
  if (!idx) return false;
  const Cell& cell = row.cells[*idx];
  if (cell.is_missing()) return false;
  if (const auto* b = std::get_if<bool>(&f.value))
    return cell.type() == Cell::Type::Logical && cell.as_logical() == *b;
  return (cell.type() == Cell::Type::Numeric || cell.type() == Cell::Type::Discrete) &&
         cell.as_numeric() == std::get<double>(f.value);
}

std::string to_string(const Rule& r) {
  std::string s = "IF ";
  for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
    if (i) s += " AND ";
    s += to_string(r.antecedent[i]);
  }
  if (r.antecedent.empty()) s += "<empty>";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", r.weight);
  s += " THEN " + to_string(r.consequent) + " [w=" + buf + "]";
  return s;
}

std::string RuleSet::dump() const {
  std::string s;
  for (const auto& r : rules) s += to_string(r) + "\n";
  return s;
}

namespace {

// Column-indexed feature candidate.
struct Candidate {
  std::size_t col;
  bool is_logical;
  bool bval;
  double dval;

  Feature to_feature(const Dataset& d) const {
    Feature f;
    f.attr = d.attributes[col];
    if (is_logical)
      f.value = bval;
    else
      f.value = dval;
    return f;
  }
};

bool cell_matches(const Cell& cell, const Candidate& c) {
  if (cell.is_missing()) return false;
  if (c.is_logical)
    return cell.type() == Cell::Type::Logical && cell.as_logical() == c.bval;
  return (cell.type() == Cell::Type::Numeric || cell.type() == Cell::Type::Discrete) &&
         cell.as_numeric() == c.dval;
}

// Under the open world assumption a Missing cell might satisfy the feature;
// out-of-class impurity is counted pessimistically so that values erased by
// the noise filter cannot fabricate a discriminator.
bool cell_maybe_matches(const Cell& cell, const Candidate& c) {
  return cell.is_missing() || cell_matches(cell, c);
}

std::string candidate_sort_key(const Dataset& d, const Candidate& c) {
  return attribute_name(d.attributes[c.col]) + "=" +
         (c.is_logical ? (c.bval ? std::string("True") : std::string("False"))
                       : format_number(c.dval));
}

}  // namespace

RuleSet learn_rules(const Dataset& d, double purity_epsilon, double closure_uniformity) {
  if (d.rows.empty()) throw PipelineError("learn_rules: empty dataset");

  RuleSet rs;
  rs.fingerprint = dataset_fingerprint(d);

  // Attribute iteration order: lexicographic by name.
  std::vector<std::size_t> attr_order(d.attributes.size());
  for (std::size_t i = 0; i < attr_order.size(); ++i) attr_order[i] = i;
  std::sort(attr_order.begin(), attr_order.end(), [&](std::size_t a, std::size_t b) {
    return attribute_name(d.attributes[a]) < attribute_name(d.attributes[b]);
  });

  for (RowClass cls : {RowClass::PreState, RowClass::PostState}) {
    std::vector<std::size_t> class_rows, other_rows;
    for (std::size_t r = 0; r < d.rows.size(); ++r)
      (d.rows[r].cls == cls ? class_rows : other_rows).push_back(r);
    if (class_rows.empty()) continue;

    // Class-level closure candidates: an attribute characterizes the class
    // when one value dominates its observed cells and at least half the
    // class's rows observe it at all.
    std::map<std::size_t, Candidate> closure_candidates;
    for (std::size_t col : attr_order) {
      std::map<std::string, std::pair<Candidate, std::size_t>> tally;
      std::size_t observed = 0;
      for (std::size_t r : class_rows) {
        const Cell& cell = d.rows[r].cells[col];
        if (cell.is_missing()) continue;
        ++observed;
        Candidate c{col, cell.type() == Cell::Type::Logical, false, 0};
        if (c.is_logical)
          c.bval = cell.as_logical();
        else
          c.dval = cell.as_numeric();
        auto [it, inserted] = tally.try_emplace(candidate_sort_key(d, c), c, 0u);
        it->second.second++;
      }
      if (observed == 0 || 2 * observed < class_rows.size()) continue;
      const std::pair<Candidate, std::size_t>* majority = nullptr;
      for (const auto& [key, entry] : tally)
        if (!majority || entry.second > majority->second) majority = &entry;
      if (static_cast<double>(majority->second) / static_cast<double>(observed) <
          closure_uniformity)
        continue;
      closure_candidates.emplace(col, majority->first);
    }

    std::set<std::size_t> remaining(class_rows.begin(), class_rows.end());
    while (!remaining.empty()) {
      // --- Grow: discriminate against the other class. The first feature is
      // scored with pessimistic out-class coverage (a Missing cell might
      // match), so values surviving asymmetric noise erasure cannot pose as
      // discriminators. Further features must strictly improve the rule's
      // in-minus-out coverage; impurity no candidate can improve on is
      // accepted.
      std::vector<Candidate> antecedent;
      std::vector<std::size_t> covered_in(remaining.begin(), remaining.end());
      std::vector<std::size_t> covered_out = other_rows;

      while (true) {
        long long current_gain =
            static_cast<long long>(covered_in.size()) - static_cast<long long>(covered_out.size());
        if (!antecedent.empty() &&
            static_cast<double>(covered_out.size()) <=
                purity_epsilon * static_cast<double>(covered_in.size()))
          break;

        const bool first = antecedent.empty();
        std::set<std::size_t> used;
        for (const auto& c : antecedent) used.insert(c.col);

        bool have_best = false;
        Candidate best{};
        long long best_gain = 0;
        std::size_t best_in = 0;
        std::string best_key;

        for (std::size_t col : attr_order) {
          if (used.count(col)) continue;
          std::vector<Candidate> values;
          if (attribute_kind(d.attributes[col]) == AttrKind::Logical) {
            values.push_back({col, true, true, 0});
            values.push_back({col, true, false, 0});
          } else {
            std::set<double> labels;
            for (std::size_t r : covered_in) {
              const Cell& cell = d.rows[r].cells[col];
              if (!cell.is_missing()) labels.insert(cell.as_numeric());
            }
            for (double v : labels) values.push_back({col, false, false, v});
          }
          for (const auto& cand : values) {
            std::size_t in = 0, out = 0;
            for (std::size_t r : covered_in)
              if (cell_matches(d.rows[r].cells[cand.col], cand)) ++in;
            if (in == 0) continue;
            for (std::size_t r : covered_out) {
              const Cell& cell = d.rows[r].cells[cand.col];
              if (first ? cell_maybe_matches(cell, cand) : cell_matches(cell, cand)) ++out;
            }
            long long gain = static_cast<long long>(in) - static_cast<long long>(out);
            std::string key = candidate_sort_key(d, cand);
            if (!have_best || gain > best_gain || (gain == best_gain && in > best_in) ||
                (gain == best_gain && in == best_in && key < best_key)) {
              have_best = true;
              best = cand;
              best_gain = gain;
              best_in = in;
              best_key = key;
            }
          }
        }
        if (!have_best) break;  // nothing can refine the rule further

        if (first) {
          // Rows no feature can tell apart from the other class are
          // unlearnable; forcing a rule onto them would only pick up junk.
          if (best_gain < 1) break;
        } else if (best_gain <= current_gain) {
          break;  // no feature helps
        }

        antecedent.push_back(best);
        std::erase_if(covered_in,
                      [&](std::size_t r) { return !cell_matches(d.rows[r].cells[best.col], best); });
        std::erase_if(covered_out,
                      [&](std::size_t r) { return !cell_matches(d.rows[r].cells[best.col], best); });
        if (covered_in.empty()) break;  // defensive; cannot happen (in >= 1)
      }

      if (antecedent.empty()) break;  // remaining rows are unlearnable (all Missing)

      // --- Close: describe the covered rows with the class's characterizing
      // features. Rows disagreeing with (or missing) a closure feature drop
      // out of the rule's coverage and are re-covered by later rules.
      std::set<std::size_t> used;
      for (const auto& c : antecedent) used.insert(c.col);
      for (std::size_t col : attr_order) {
        auto cand_it = closure_candidates.find(col);
        if (cand_it == closure_candidates.end() || used.count(col) || covered_in.empty())
          continue;
        const Candidate& closure = cand_it->second;
        std::size_t observed = 0, matching = 0;
        for (std::size_t r : covered_in) {
          const Cell& cell = d.rows[r].cells[col];
          if (cell.is_missing()) continue;
          ++observed;
          matching += cell_matches(cell, closure);
        }
        if (matching == 0 || 2 * observed < covered_in.size()) continue;
        if (static_cast<double>(matching) / static_cast<double>(observed) < closure_uniformity)
          continue;
        antecedent.push_back(closure);
        std::erase_if(covered_in, [&](std::size_t r) {
          return !cell_matches(d.rows[r].cells[col], closure);
        });
      }

      Rule rule;
      rule.consequent = cls;
      for (const auto& c : antecedent) rule.antecedent.push_back(c.to_feature(d));
      std::sort(rule.antecedent.begin(), rule.antecedent.end(),
                [](const Feature& a, const Feature& b) { return feature_key(a) < feature_key(b); });

      // Weight: exact covered fraction over the full class.
      std::size_t covered_total = 0;
      for (std::size_t r : class_rows) {
        bool all = true;
        for (const auto& c : antecedent)
          if (!cell_matches(d.rows[r].cells[c.col], c)) {
            all = false;
            break;
          }
        covered_total += all;
      }
      rule.weight = static_cast<double>(covered_total) / static_cast<double>(class_rows.size());
      rs.rules.push_back(std::move(rule));

      for (std::size_t r : covered_in) remaining.erase(r);
    }
  }
  return rs;
}

}  // namespace planlearn
