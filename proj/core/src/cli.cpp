#include "planlearn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "planlearn/evaluation.hpp"
#include "planlearn/text.hpp"

namespace planlearn {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("cannot write " + path.string());
}

// Traces are read in filename order so runs are reproducible.
std::vector<std::pair<std::string, PlanTrace>> load_traces(const std::string& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) throw IoError("no such trace directory: " + dir);
  if (fs::is_regular_file(dir)) {
    files.push_back(dir);
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".trace")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw IoError("no .trace files under " + dir);
  std::vector<std::pair<std::string, PlanTrace>> traces;
  for (const auto& f : files) traces.emplace_back(f.filename().string(), parse_plan_trace(read_file(f)));
  return traces;
}

std::vector<PlanTrace> just_traces(std::vector<std::pair<std::string, PlanTrace>> named) {
  std::vector<PlanTrace> out;
  out.reserve(named.size());
  for (auto& [name, t] : named) out.push_back(std::move(t));
  return out;
}

void emit_report(const std::string& json, const std::string& report_path) {
  if (report_path.empty())
    std::cout << json << "\n";
  else
    write_file(report_path, json + "\n");
}

struct CommonOptions {
  std::uint64_t seed = 0;
  double logical_threshold = 0.05;
  double alpha = 0.6;
  double beta = 0.4;
  double acceptance = 0.05;
  double irrelevance = 0.05;
  double sr_threshold = 0.02;
  double sr_timeout = 300;
  double purity = 0.0;
  bool skip_filters = false;
  bool skip_refinement = false;
  int jobs = 1;

  LearnConfig to_config() const {
    LearnConfig cfg;
    cfg.filter.logical_threshold = logical_threshold;
    cfg.filter.alpha = alpha;
    cfg.filter.beta = beta;
    cfg.filter.acceptance = acceptance;
    cfg.filter.seed = seed;
    cfg.refine.irrelevance_ratio = irrelevance;
    cfg.regression.acceptance_threshold = sr_threshold;
    cfg.regression.timeout_seconds = sr_timeout;
    cfg.rule_purity = purity;
    cfg.skip_filters = skip_filters;
    cfg.skip_refinement = skip_refinement;
    cfg.jobs = jobs;
    return cfg;
  }

  std::string to_json() const {
    std::ostringstream out;
    out << "{\"seed\":" << seed << ",\"logical_threshold\":" << format_number(logical_threshold)
        << ",\"alpha\":" << format_number(alpha) << ",\"beta\":" << format_number(beta)
        << ",\"acceptance\":" << format_number(acceptance)
        << ",\"irrelevance\":" << format_number(irrelevance)
        << ",\"sr_threshold\":" << format_number(sr_threshold)
        << ",\"sr_timeout\":" << format_number(sr_timeout)
        << ",\"purity\":" << format_number(purity)
        << ",\"skip_filters\":" << (skip_filters ? "true" : "false")
        << ",\"skip_refinement\":" << (skip_refinement ? "true" : "false")
        << ",\"jobs\":" << jobs << "}";
    return out.str();
  }
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--seed", opts.seed, "RNG seed")->envname("PLANLEARN_SEED");
  cmd->add_option("--logical-threshold", opts.logical_threshold,
                  "statistical noise filtering threshold");
  cmd->add_option("--alpha", opts.alpha, "cluster quality silhouette weight");
  cmd->add_option("--beta", opts.beta, "cluster quality dispersion weight");
  cmd->add_option("--acceptance", opts.acceptance, "cluster acceptance criterion");
  cmd->add_option("--irrelevance", opts.irrelevance, "irrelevant feature detection threshold");
  cmd->add_option("--sr-threshold", opts.sr_threshold, "symbolic regression acceptance threshold");
  cmd->add_option("--sr-timeout", opts.sr_timeout, "symbolic regression timeout (seconds)");
  cmd->add_option("--purity", opts.purity, "rule impurity tolerated by the covering learner");
  cmd->add_flag("--skip-filters", opts.skip_filters, "disable the noise filtering stages");
  cmd->add_flag("--skip-refinement", opts.skip_refinement, "disable meta-state refinement");
  cmd->add_option("--jobs", opts.jobs, "parallel per-action pipelines");
}

std::string domain_score_json(const DomainScore& score) {
  std::ostringstream out;
  out << "{\"per_action\":{";
  bool first = true;
  for (const auto& [name, m] : score.per_action) {
    if (!first) out << ",";
    first = false;
    out << "\"" << name << "\":{\"tp\":" << m.tp << ",\"fp\":" << m.fp << ",\"fn\":" << m.fn
        << ",\"precision\":" << format_number(m.precision)
        << ",\"recall\":" << format_number(m.recall)
        << ",\"fscore\":" << format_number(m.fscore) << "}";
  }
  out << "},\"domain\":{\"precision\":" << format_number(score.precision)
      << ",\"recall\":" << format_number(score.recall)
      << ",\"fscore\":" << format_number(score.fscore) << "}}";
  return out.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"learn numeric PDDL action models from noisy plan traces"};
  app.require_subcommand(1);

  CommonOptions opts;

  // --- learn
  auto* learn = app.add_subcommand("learn", "learn a domain from plan traces");
  std::string learn_traces, learn_out, learn_report;
  learn->add_option("--traces", learn_traces, "trace file or directory")->required();
  learn->add_option("--out", learn_out, "output PDDL path")->required();
  learn->add_option("--report", learn_report, "write the learn report JSON here");
  add_common(learn, opts);

  // --- inject-noise
  auto* inject = app.add_subcommand("inject-noise", "write corrupted copies of traces");
  std::string inject_traces, inject_out, inject_kind = "mixed";
  double inject_pct = 0.0;
  inject->add_option("--traces", inject_traces, "trace file or directory")->required();
  inject->add_option("--out", inject_out, "output directory")->required();
  inject->add_option("--pct", inject_pct, "fraction of state elements to corrupt")->required();
  inject->add_option("--kind", inject_kind,
                     "logical-outlier | numeric-outlier | numeric-random | mixed");
  inject->add_option("--seed", opts.seed, "RNG seed")->envname("PLANLEARN_SEED");

  // --- evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a learned domain against a reference");
  std::string eval_learned, eval_reference, eval_report;
  evaluate->add_option("--learned", eval_learned, "learned domain PDDL")->required();
  evaluate->add_option("--reference", eval_reference, "reference domain PDDL")->required();
  evaluate->add_option("--report", eval_report, "write the metrics JSON here");

  // --- validate
  auto* validate = app.add_subcommand("validate", "replay traces against a domain");
  std::string val_domain, val_traces, val_report;
  bool val_require = false;
  validate->add_option("--domain", val_domain, "domain PDDL")->required();
  validate->add_option("--traces", val_traces, "trace file or directory")->required();
  validate->add_option("--report", val_report, "write the validity JSON here");
  validate->add_flag("--require-valid", val_require, "exit nonzero unless all traces replay");

  // --- xval
  auto* xval = app.add_subcommand("xval", "k-fold cross-validation with optional noise");
  std::string xval_traces, xval_reference, xval_report, xval_ablation = "none",
              xval_kind = "mixed";
  int xval_k = 5;
  double xval_noise = 0.0;
  bool xval_require = false;
  xval->add_option("--traces", xval_traces, "trace file or directory")->required();
  xval->add_option("--reference", xval_reference, "reference domain PDDL for scoring");
  xval->add_option("--k", xval_k, "number of folds");
  xval->add_option("--noise", xval_noise, "noise fraction injected into training folds");
  xval->add_option("--kind", xval_kind, "noise kind");
  xval->add_option("--ablation", xval_ablation, "none | filters | refinement | both");
  xval->add_option("--report", xval_report, "write the fold report JSON here");
  xval->add_flag("--require-valid", xval_require, "exit nonzero unless all folds are valid");
  add_common(xval, opts);

  // --- gen-traces
  auto* gen = app.add_subcommand("gen-traces", "generate synthetic traces from a built-in world");
  std::string gen_world = "rover", gen_out, gen_reference;
  int gen_n = 50, gen_min = -1, gen_max = -1;
  std::uint64_t gen_seed = 0;
  gen->add_option("--world", gen_world, "rover | tanker | blocks");
  gen->add_option("--n", gen_n, "number of traces");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--emit-reference", gen_reference, "also write the world's reference domain");
  gen->add_option("--min-len", gen_min, "minimum walk length");
  gen->add_option("--max-len", gen_max, "maximum walk length");
  gen->add_option("--seed", gen_seed, "RNG seed")->envname("PLANLEARN_SEED");

  // --- inspect-dataset
  auto* inspect = app.add_subcommand("inspect-dataset", "dump an action's dataset as CSV");
  std::string ins_traces, ins_action, ins_out;
  bool ins_filtered = false;
  inspect->add_option("--traces", ins_traces, "trace file or directory")->required();
  inspect->add_option("--action", ins_action, "action name")->required();
  inspect->add_option("--out", ins_out, "write CSV here (default stdout)");
  inspect->add_flag("--filtered", ins_filtered, "dump after the noise-filter stages");
  add_common(inspect, opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << std::endl;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << std::endl;
    return 2;
  }

  try {
    if (*learn) {
      auto traces = just_traces(load_traces(learn_traces));
      LearnConfig cfg = opts.to_config();
      LearnResult result = learn_domain(traces, cfg);
      write_file(learn_out, serialize_domain(result.domain));
      emit_report("{\"config\":" + opts.to_json() +
                      ",\"stage_stats\":" + result.report.to_json() + "}",
                  learn_report);
    } else if (*inject) {
      auto named = load_traces(inject_traces);
      std::vector<PlanTrace> traces;
      for (auto& [name, t] : named) traces.push_back(std::move(t));
      NoiseSpec spec{inject_pct, noise_kind_from_string(inject_kind), opts.seed};
      traces = inject_noise(std::move(traces), spec);
      for (std::size_t i = 0; i < traces.size(); ++i)
        write_file(fs::path(inject_out) / named[i].first, serialize_plan_trace(traces[i]));
    } else if (*evaluate) {
      Domain learned_domain = parse_reference_domain(read_file(eval_learned));
      Domain reference = parse_reference_domain(read_file(eval_reference));
      DomainScore score = score_domain(learned_domain, reference);
      emit_report(domain_score_json(score), eval_report);
    } else if (*validate) {
      Domain domain = parse_reference_domain(read_file(val_domain));
      auto named = load_traces(val_traces);
      bool all_valid = true;
      std::ostringstream out;
      out << "{\"traces\":[";
      for (std::size_t i = 0; i < named.size(); ++i) {
        if (i) out << ",";
        std::string detail;
        bool ok;
        try {
          ReplayResult rr = replay_validate(domain, named[i].second);
          ok = rr.ok;
          detail = rr.detail;
        } catch (const Error& e) {
          ok = false;
          detail = e.what();
        }
        all_valid = all_valid && ok;
        out << "{\"trace\":\"" << named[i].first << "\",\"valid\":" << (ok ? "true" : "false")
            << ",\"detail\":\"";
        for (char c : detail) {
          if (c == '"' || c == '\\') out << '\\';
          out << c;
        }
        out << "\"}";
      }
      out << "],\"validity\":" << (all_valid ? "true" : "false") << "}";
      emit_report(out.str(), val_report);
      if (val_require && !all_valid) return 1;
    } else if (*xval) {
      auto traces = just_traces(load_traces(xval_traces));
      Domain reference;
      bool have_reference = !xval_reference.empty();
      if (have_reference) reference = parse_reference_domain(read_file(xval_reference));

      std::optional<NoiseSpec> noise;
      if (xval_noise > 0)
        noise = NoiseSpec{xval_noise, noise_kind_from_string(xval_kind), opts.seed};

      auto run_arm = [&](bool ablate_filters, bool ablate_refinement) {
        LearnConfig cfg = opts.to_config();
        cfg.skip_filters = cfg.skip_filters || ablate_filters;
        cfg.skip_refinement = cfg.skip_refinement || ablate_refinement;
        return cross_validate(traces, xval_k, cfg, noise,
                              have_reference ? &reference : nullptr, opts.seed);
      };

      std::ostringstream out;
      out << "{\"config\":" << opts.to_json() << ",\"k\":" << xval_k
          << ",\"noise\":" << format_number(xval_noise) << ",\"ablation\":\"" << xval_ablation
          << "\",";
      bool all_valid = true;
      if (xval_ablation == "none") {
        FoldReport rep = run_arm(false, false);
        all_valid = rep.all_valid;
        out << "\"result\":" << rep.to_json() << "}";
      } else if (xval_ablation == "filters" || xval_ablation == "refinement" ||
                 xval_ablation == "both") {
        bool abf = xval_ablation != "refinement";
        bool abr = xval_ablation != "filters";
        FoldReport enabled = run_arm(false, false);
        FoldReport ablated = run_arm(abf, abr);
        all_valid = enabled.all_valid;
        out << "\"enabled\":" << enabled.to_json() << ",\"ablated\":" << ablated.to_json() << "}";
      } else {
        std::cerr << "unknown ablation: " << xval_ablation << std::endl;
        return 2;
      }
      emit_report(out.str(), xval_report);
      if (xval_require && !all_valid) return 1;
    } else if (*gen) {
      GeneratorWorld world = make_world(gen_world);
      if (gen_min > 0) world.min_len = gen_min;
      if (gen_max > 0) world.max_len = gen_max;
      auto traces = generate_traces(world, gen_n, gen_seed);
      for (std::size_t i = 0; i < traces.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "trace_%03zu.trace", i);
        write_file(fs::path(gen_out) / name, serialize_plan_trace(traces[i]));
      }
      if (!gen_reference.empty())
        write_file(gen_reference, serialize_domain(world.reference));
    } else if (*inspect) {
      auto traces = just_traces(load_traces(ins_traces));
      auto groups = group_transitions(traces);
      auto it = groups.find(ins_action);
      if (it == groups.end()) throw PipelineError("no transitions for action " + ins_action);
      int arity = static_cast<int>(it->second[0].action.args.size());
      Dataset d = build_dataset(ins_action, arity, it->second);
      if (ins_filtered) {
        LearnConfig cfg = opts.to_config();
        d = filter_logical_noise(std::move(d), cfg.filter);
        d = discretise_fluents(std::move(d), cfg.filter);
      }
      std::string csv = dataset_to_csv(d);
      if (ins_out.empty())
        std::cout << csv;
      else
        write_file(ins_out, csv);
    }
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << std::endl;
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace planlearn
