// causim command-line front end.
//
// Exit codes: 0 ok, 2 validation, 3 I/O, 4 enumeration cap exceeded.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causim/builtins.hpp"
#include "causim/causim.hpp"
#include "causim/config.hpp"

namespace fs = std::filesystem;
using namespace causim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitCap = 4;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// JSON reports go to --out when given, else stdout.
void emit(const GlobalOptions& g, const Json& report) {
  if (!g.format.empty() && g.format != "json")
    throw ValidationError("this command only emits --format json");
  const std::string text = report.dump(2) + "\n";
  if (g.out.empty())
    std::cout << text;
  else
    write_file(g.out, text);
}

void make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir + "'");
}

ScenarioConfig load_scenario(const GlobalOptions& g, std::optional<std::size_t> s,
                             std::optional<std::size_t> t,
                             std::optional<std::size_t> reps) {
  ScenarioConfig cfg;
  if (!g.config.empty()) cfg = ScenarioConfig::from_json(read_json_file(g.config));
  if (g.seed) cfg.seed = g.seed;
  if (!g.out.empty()) cfg.out = g.out;
  if (!g.format.empty()) cfg.format = g.format;
  if (s) cfg.s = *s;
  if (t) cfg.t = *t;
  if (reps) cfg.reps = *reps;
  return cfg;
}

std::string trial_csv_name(std::size_t rep, std::size_t reps) {
  if (reps == 1) return "trial.csv";
  std::ostringstream name;
  name << "trial_" << std::setw(4) << std::setfill('0') << rep << ".csv";
  return name.str();
}

int cmd_simulate_rct(const ScenarioConfig& cfg) {
  cfg.validate(true);
  const auto& pop = *cfg.population;
  make_out_dir(cfg.out);
  const auto truth = population_summary(pop);
  Json summary = {{"mode", "rct"},
                  {"n", pop.size()},
                  {"s", cfg.s},
                  {"t", cfg.t},
                  {"reps", cfg.reps},
                  {"seed", *cfg.seed},
                  {"tau_bar", truth.tau_bar},
                  {"nu_bar", truth.nu_bar},
                  {"true_effect", truth.true_effect}};

  auto export_trial = [&](std::size_t rep, const TrialOutcome& trial) {
    if (cfg.format != "csv") return;
    std::ostringstream csv;
    write_trial_csv(csv, pop, trial);
    write_file(fs::path(cfg.out) / trial_csv_name(rep, cfg.reps), csv.str());
  };

  if (cfg.reps == 1) {
    SeededRng rng(*cfg.seed, 0);
    const auto trial = run_trial(pop, cfg.s, cfg.t, rng);
    export_trial(0, trial);
    summary["rho1"] = rho1(trial);
    summary["rho0"] = rho0(trial);
    summary["effect"] = effect_estimate(trial);
    summary["stderr"] = nullptr;
  } else {
    const auto rep = replicate_trials(pop, cfg.s, cfg.t, cfg.reps, *cfg.seed, export_trial);
    summary["rho1"] = rep.mean_rho1;
    summary["rho0"] = rep.mean_rho0;
    summary["effect"] = rep.mean_effect;
    summary["stderr"] = rep.std_error;
    summary["per_rep_effects"] = rep.per_rep;
  }
  write_file(fs::path(cfg.out) / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate_obs(const ScenarioConfig& cfg) {
  cfg.validate(false);
  const auto& pop = *cfg.population;
  make_out_dir(cfg.out);
  Json samples = Json::array();
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    SeededRng rng(*cfg.seed, rep);
    const auto sample = sample_observational(pop, cfg.s, rng);
    if (cfg.format == "csv") {
      std::ostringstream csv;
      write_observational_csv(csv, pop, sample);
      const std::string name =
          cfg.reps == 1 ? "sample.csv" : "sample_" + std::to_string(rep) + ".csv";
      write_file(fs::path(cfg.out) / name, csv.str());
    }
    Json means = Json::object();
    for (std::size_t j = 0; j < pop.attribute_count(); ++j) {
      double sum = 0.0;
      for (const auto& row : sample.data) sum += row[j];
      means[pop.attribute(j).name] = sum / static_cast<double>(sample.size());
    }
    samples.push_back({{"rep", rep}, {"attribute_means", means}});
  }
  const Json summary = {{"mode", "obs"},
                        {"n", pop.size()},
                        {"s", cfg.s},
                        {"reps", cfg.reps},
                        {"seed", *cfg.seed},
                        {"samples", samples}};
  write_file(fs::path(cfg.out) / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

Json rational_list(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(rational_to_json(v));
  return out;
}

Json cmd_hypergeom(std::size_t n, std::size_t K, std::size_t t) {
  const OverlapCounts counts(n, K, t);
  const auto dist = hypergeom_distribution(n, K, t);
  const auto summed = hypergeom_moments_from_pmf(counts);
  Json report = {{"n", n}, {"K", K}, {"t", t},
                 {"pmf", rational_list(dist.probs)},
                 {"total", rational_to_json(dist.total())},
                 {"mean_from_pmf", rational_to_json(summed.mean)},
                 {"variance_from_pmf", rational_to_json(summed.variance)}};
  bool holds = dist.total() == 1;
  report["mean"] = rational_to_json(summed.mean);
  if (n >= 2) {
    const auto closed = hypergeom_moments(n, K, t);
    report["mean"] = rational_to_json(closed.mean);
    report["variance"] = rational_to_json(closed.variance);
    report["binomial_variance"] = rational_to_json(binomial_variance(n, K, t));
    holds = holds && closed.mean == summed.mean && closed.variance == summed.variance;
  }
  report["holds"] = holds;
  return report;
}

Json cmd_chernoff(std::size_t n, std::size_t K, std::size_t t, double eps) {
  const auto r = chernoff_check(n, K, t, exact_rational(eps));
  return {{"n", n}, {"K", K}, {"t", t}, {"eps", eps},
          {"exact_upper_tail", rational_to_json(r.exact_upper_tail)},
          {"exact_lower_tail", rational_to_json(r.exact_lower_tail)},
          {"bound", r.bound},
          {"holds", r.holds},
          {"lower_holds", r.lower_holds}};
}

Json dag_report(const BinaryDag& dag) {
  return joint_to_json(dag.names(), joint_distribution(dag));
}

Json cmd_dag_appendix() {
  const auto dag = appendix_model<double>();
  Json report = dag_report(dag);
  report["queries"] = builtin_appendix();
  report["queries"].erase("name");
  return report;
}

BinaryDag apply_settings(BinaryDag dag, const std::vector<std::string>& settings) {
  for (const auto& setting : settings) {
    const auto eq = setting.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects NAME=0|1, got '" + setting + "'");
    const std::string name = setting.substr(0, eq);
    const std::string value = setting.substr(eq + 1);
    if (value != "0" && value != "1") throw ValidationError("--set value must be 0 or 1");
    const auto v = dag.index_of(name);
    if (!v) throw ValidationError("unknown vertex '" + name + "'");
    dag = intervene(dag, *v, static_cast<std::uint8_t>(value == "1"));
  }
  return dag;
}

Json cmd_tables_analyze(const std::string& csv_path, double tol) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open '" + csv_path + "'");
  const auto record = read_trial_csv(in);
  const auto pairs = treat_response_pairs(record.trial);
  const auto pooled = tabulate(pairs);
  const auto pooled_gap = independence_gap(pooled);
  const Rational tolerance = exact_rational(tol);

  Json stratified = Json::array();
  for (const auto& attr : record.attributes) {
    const auto strata = stratify(pairs, attr.values, attr.name);
    Json entry = {{"attribute", attr.name},
                  {"strata", {{strata[0].label, table_to_json(strata[0].table)},
                              {strata[1].label, table_to_json(strata[1].table)}}}};
    Json gaps = Json::array();
    std::size_t usable = 0;
    for (const auto& s : strata) {
      const auto g = independence_gap(s.table);
      usable += g.has_value();
      gaps.push_back(g ? rational_to_json(*g) : Json(nullptr));
    }
    entry["stratum_gaps"] = gaps;
    if (usable == 2 && pooled_gap)
      entry["verdict"] = to_string(simpson_check(strata, tolerance).verdict);
    else
      entry["verdict"] = nullptr;
    stratified.push_back(std::move(entry));
  }

  Json ranked = Json::array();
  Json search_report = Json::object();
  if (pairs.size() >= 2) {
    const auto search = confounder_search(pairs, record.attributes, tolerance);
    for (const auto& p : search.ranked) {
      Json gaps = Json::array();
      for (const auto& g : p.gaps) gaps.push_back(g ? rational_to_json(*g) : Json(nullptr));
      ranked.push_back({{"label", p.label}, {"gaps", gaps},
                        {"degenerate", p.degenerate}, {"post_hoc", p.post_hoc}});
    }
    search_report = {{"ranked", ranked},
                     {"named_evaluated", search.named_evaluated},
                     {"subsets_evaluated", search.subsets_evaluated},
                     {"exhaustive", search.exhaustive},
                     {"cap_exceeded", search.cap_exceeded}};
  }
  return {{"units", pairs.size()},
          {"pooled", table_to_json(pooled)},
          {"pooled_gap", pooled_gap ? rational_to_json(*pooled_gap) : Json(nullptr)},
          {"stratified", stratified},
          {"confounder_search", search_report}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-population causal experiment engine"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Scenario config JSON");
  app.add_option("--seed", g.seed, "64-bit seed (required for simulate)");
  app.add_option("--out", g.out, "Output directory (simulate) or report file");
  app.add_option("--format", g.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run observational or randomized simulations");
  simulate->require_subcommand(1);
  std::optional<std::size_t> sim_s, sim_t, sim_reps;
  auto* sim_obs = simulate->add_subcommand("obs", "Sampling with replacement");
  auto* sim_rct = simulate->add_subcommand("rct", "Randomized controlled trial");
  for (auto* sub : {sim_obs, sim_rct}) {
    sub->add_option("--s", sim_s, "Sample size");
    sub->add_option("--reps", sim_reps, "Replications");
  }
  sim_rct->add_option("--t", sim_t, "Treated count");

  // exact
  auto* exact = app.add_subcommand("exact", "Exact enumeration and hypergeometric checks");
  exact->require_subcommand(1);
  std::size_t ex_n = 0, ex_s = 0, ex_t = 0, ex_K = 0;
  double ex_eps = 0.0;
  std::uint64_t ex_cap = kDefaultEnumerationCap;
  bool ex_enumerate = false;
  auto* ex_indep = exact->add_subcommand("verify-independence", "Pr(T_k=1 | A_kj) = t/s for all attributes");
  auto* ex_hyper = exact->add_subcommand("hypergeom", "Overlap pmf and moments");
  auto* ex_chern = exact->add_subcommand("chernoff", "Exact overlap tails vs the exponential bound");
  auto* ex_c0 = exact->add_subcommand("c0-size", "Size of the (sample, treated) space");
  for (auto* sub : {ex_indep, ex_c0}) {
    sub->add_option("--n", ex_n)->required();
    sub->add_option("--s", ex_s)->required();
    sub->add_option("--t", ex_t)->required();
    sub->add_option("--cap", ex_cap, "Enumeration cap");
  }
  ex_c0->add_flag("--enumerate", ex_enumerate, "Also count points by enumeration");
  for (auto* sub : {ex_hyper, ex_chern}) {
    sub->add_option("--n", ex_n)->required();
    sub->add_option("--K", ex_K)->required();
    sub->add_option("--t", ex_t)->required();
  }
  ex_chern->add_option("--eps", ex_eps)->required();

  // tables
  auto* tables = app.add_subcommand("tables", "Contingency-table analysis");
  tables->require_subcommand(1);
  auto* tb_example = tables->add_subcommand("example1", "Stratified tables with masked dependence");
  auto* tb_analyze = tables->add_subcommand("analyze", "Analyze a trial CSV");
  std::string tb_csv;
  double tb_tol = 1e-9;
  tb_analyze->add_option("--csv", tb_csv)->required();
  tb_analyze->add_option("--tol", tb_tol, "Gap tolerance");

  // dag
  auto* dag = app.add_subcommand("dag", "Binary DAG models");
  dag->require_subcommand(1);
  auto* dag_appendix = dag->add_subcommand("appendix", "Hidden common-cause model");
  auto* dag_joint = dag->add_subcommand("joint", "Joint distribution of a model");
  auto* dag_intervene = dag->add_subcommand("intervene", "Joint after forcing vertices");
  std::string dag_model;
  std::vector<std::string> dag_set;
  dag_joint->add_option("--model", dag_model)->required();
  dag_intervene->add_option("--model", dag_model)->required();
  dag_intervene->add_option("--set", dag_set, "NAME=0|1")->required();

  // builtin
  auto* builtin = app.add_subcommand("builtin", "Built-in reproductions");
  std::string builtin_name;
  builtin->add_option("name", builtin_name, "example1|appendix|cancellation")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*simulate) {
      const auto cfg = load_scenario(g, sim_s, sim_t, sim_reps);
      return *sim_rct ? cmd_simulate_rct(cfg) : cmd_simulate_obs(cfg);
    }
    if (*exact) {
      if (*ex_indep) {
        const auto r = verify_treatment_independence(ex_n, ex_s, ex_t, ex_cap);
        emit(g, {{"n", ex_n}, {"s", ex_s}, {"t", ex_t},
                 {"expected", rational_to_json(r.expected)},
                 {"attributes_checked", r.attributes_checked},
                 {"comparisons", r.comparisons},
                 {"holds", r.holds}});
      } else if (*ex_hyper) {
        emit(g, cmd_hypergeom(ex_n, ex_K, ex_t));
      } else if (*ex_chern) {
        emit(g, cmd_chernoff(ex_n, ex_K, ex_t, ex_eps));
      } else {
        const auto size = c0_size(ex_n, ex_s, ex_t);
        Json report = {{"n", ex_n}, {"s", ex_s}, {"t", ex_t}, {"c0_size", size.str()}};
        if (ex_enumerate) {
          std::uint64_t points = 0;
          enumerate_trials(ex_n, ex_s, ex_t, [&](const TrialPoint&) { ++points; }, ex_cap);
          report["enumerated"] = points;
          report["holds"] = BigInt(points) == size;
        }
        emit(g, report);
      }
      return kExitOk;
    }
    if (*tables) {
      emit(g, *tb_example ? builtin_example1() : cmd_tables_analyze(tb_csv, tb_tol));
      return kExitOk;
    }
    if (*dag) {
      if (*dag_appendix) {
        emit(g, cmd_dag_appendix());
      } else {
        auto model = dag_from_json(read_json_file(dag_model));
        if (*dag_intervene) model = apply_settings(std::move(model), dag_set);
        emit(g, dag_report(model));
      }
      return kExitOk;
    }
    if (*builtin) {
      Json report;
      if (builtin_name == "example1")
        report = builtin_example1();
      else if (builtin_name == "appendix")
        report = builtin_appendix();
      else if (builtin_name == "cancellation")
        report = builtin_cancellation(g.seed.value_or(0));
      else
        throw ValidationError("unknown builtin '" + builtin_name + "'");
      emit(g, report);
      return kExitOk;
    }
  } catch (const CapExceeded& e) {
    std::cerr << "causim: " << e.what() << '\n';
    return kExitCap;
  } catch (const ValidationError& e) {
    std::cerr << "causim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Json::exception& e) {
    std::cerr << "causim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "causim: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}
