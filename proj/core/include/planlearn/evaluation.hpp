#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "planlearn/model_synthesis.hpp"

namespace planlearn {

// ---------------------------------------------------------------------------
// Noise injection

struct NoiseSpec {
  double percentage = 0;  // fraction of eligible state elements to corrupt
  enum class Kind { LogicalOutlier, NumericOutlier, NumericRandom, Mixed } kind = Kind::Mixed;
  std::uint64_t seed = 0;
};

NoiseSpec::Kind noise_kind_from_string(const std::string& s);
std::string to_string(NoiseSpec::Kind k);

// Corrupts ceil(percentage * |eligible slots|) state elements, sampled
// without replacement. Logical outliers flip truth values; numeric outliers
// replace the value with a draw from [min-10*range, max+10*range] of that
// fluent name (random sign); numeric random noise multiplies by 1+u with u
// uniform in [-0.1, 0.1]. Mixed picks per slot according to its type.
std::vector<PlanTrace> inject_noise(std::vector<PlanTrace> traces, const NoiseSpec& spec);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  long long tp = 0, fp = 0, fn = 0;
  double precision = 1, recall = 1, fscore = 1;

  static Metrics from_counts(long long tp, long long fp, long long fn);
};

// Structural precision/recall/F-score over the union of preconditions and
// effects, with expression equivalence up to commutativity/associativity of
// + and *. Throws PipelineError on arity mismatch.
Metrics score_model(const ActionModel& learned, const ActionModel& reference);

struct DomainScore {
  std::map<std::string, Metrics> per_action;  // over the reference's actions
  double precision = 1, recall = 1, fscore = 1;  // arithmetic means
};

DomainScore score_domain(const Domain& learned, const Domain& reference);

// ---------------------------------------------------------------------------
// Replay validation

struct ReplayResult {
  bool ok = true;
  std::string detail;  // first divergence or failed precondition
  int step = -1;       // action index of the failure, or state index for divergences
};

// Replays the trace from state 0: checks each action's preconditions on the
// current state, applies its effects, and finally requires the computed state
// to agree with the recorded final state on every atom that state mentions.
// Throws ReplayError for actions missing from the domain and for fluents a
// numeric expression needs but the state lacks.
ReplayResult replay_validate(const Domain& d, const PlanTrace& trace);

// Grounds and checks a single condition; lenient mode treats unevaluable
// numeric conditions as unsatisfied instead of throwing.
bool condition_holds(const Condition& c, const State& s, const ActionInstance& a, bool strict);

// Applies all effects simultaneously (numeric amounts evaluated on the
// incoming state). Throws ReplayError when an amount cannot be evaluated.
State apply_action(const ActionModel& m, const ActionInstance& a, const State& s);

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldResult {
  int fold = 0;
  bool scored = false;  // a reference domain was available
  DomainScore score;
  bool valid = true;
  std::string validity_detail;
};

struct FoldReport {
  std::vector<FoldResult> folds;
  double mean_precision = 1, mean_recall = 1, mean_fscore = 1;
  bool all_valid = true;

  std::string to_json() const;
};

// Seeded shuffle into k folds; trains on k-1 folds (with noise injected into
// the training folds only, when a spec is given) and replays the learned
// domain over the untouched test fold. Throws PipelineError when |traces| < k.
FoldReport cross_validate(const std::vector<PlanTrace>& traces, int k, const LearnConfig& cfg,
                          const std::optional<NoiseSpec>& noise, const Domain* reference,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic trace generation

struct GeneratorWorld {
  std::string name;
  Domain reference;
  std::vector<std::string> objects;
  int min_len = 3;
  int max_len = 10;
  std::function<State(std::mt19937_64&)> sample_initial;
  // Extra applicability constraints for the random walk (beyond the model's
  // preconditions); null means none.
  std::function<bool(const ActionInstance&, const State&)> policy;
};

// Random walks through the world: at each step one applicable grounded action
// is chosen uniformly and applied; full states are recorded. Every returned
// trace replay-validates against world.reference. Throws PipelineError on a
// dead end before min_len.
std::vector<PlanTrace> generate_traces(const GeneratorWorld& world, int n, std::uint64_t seed);

std::vector<ActionInstance> applicable_actions(const Domain& d, const State& s,
                                               const std::vector<std::string>& objects,
                                               const GeneratorWorld* policy_world = nullptr);

const std::vector<std::string>& builtin_world_names();
GeneratorWorld make_world(const std::string& name);
GeneratorWorld make_rover_world();
GeneratorWorld make_tanker_world();
GeneratorWorld make_blocks_world();

}  // namespace planlearn
