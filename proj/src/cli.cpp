#include "exch/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "exch/dataset_io.hpp"
#include "exch/diagnostics.hpp"
#include "exch/error.hpp"
#include "exch/graph.hpp"
#include "exch/inference.hpp"

namespace exch::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  // shared
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output;
  std::string config_path;
  // simulate / replicate
  std::string dgp = "point";
  double gamma = 0.0;
  std::int64_t per_group = 250;
  std::int64_t replications = 1;
  bool stratify = false;
  std::string pooling = "pooled";
  // summarize / estimate
  std::string input;
  std::int64_t min_count = 0;
  std::string method;
  int k = 8;
  double prior_a = 1.0;
  double prior_b = 1.0;
  double prior_sd = 10.0;
  std::int64_t iterations = 20'000;
  std::int64_t burn_in = 2'000;
  std::int64_t thin = 1;
  double step_scale = 2.4;
  int chains = 1;
  std::int64_t draws = 0;
  // graph
  std::string figure;
  std::string dag_file;
  bool under_null = false;
  std::vector<std::string> backdoor;
  std::vector<std::string> adjust;
  std::vector<std::string> dsep;
  std::vector<std::string> given;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON config keys are the long flag names; '-' and '_' are interchangeable.
void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");

  std::map<std::string, std::function<void(const json&)>> setters = {
      {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"threads", [&](const json& v) { c.threads = v.get<int>(); }},
      {"output", [&](const json& v) { c.output = v.get<std::string>(); }},
      {"dgp", [&](const json& v) { c.dgp = v.get<std::string>(); }},
      {"gamma", [&](const json& v) { c.gamma = v.get<double>(); }},
      {"per_group", [&](const json& v) { c.per_group = v.get<std::int64_t>(); }},
      {"replications", [&](const json& v) { c.replications = v.get<std::int64_t>(); }},
      {"stratify", [&](const json& v) { c.stratify = v.get<bool>(); }},
      {"pooling", [&](const json& v) { c.pooling = v.get<std::string>(); }},
      {"input", [&](const json& v) { c.input = v.get<std::string>(); }},
      {"min_count", [&](const json& v) { c.min_count = v.get<std::int64_t>(); }},
      {"method", [&](const json& v) { c.method = v.get<std::string>(); }},
      {"k", [&](const json& v) { c.k = v.get<int>(); }},
      {"prior_a", [&](const json& v) { c.prior_a = v.get<double>(); }},
      {"prior_b", [&](const json& v) { c.prior_b = v.get<double>(); }},
      {"prior_sd", [&](const json& v) { c.prior_sd = v.get<double>(); }},
      {"iterations", [&](const json& v) { c.iterations = v.get<std::int64_t>(); }},
      {"burn_in", [&](const json& v) { c.burn_in = v.get<std::int64_t>(); }},
      {"thin", [&](const json& v) { c.thin = v.get<std::int64_t>(); }},
      {"step_scale", [&](const json& v) { c.step_scale = v.get<double>(); }},
      {"chains", [&](const json& v) { c.chains = v.get<int>(); }},
      {"draws", [&](const json& v) { c.draws = v.get<std::int64_t>(); }},
      {"figure", [&](const json& v) { c.figure = v.get<std::string>(); }},
      {"dag", [&](const json& v) { c.dag_file = v.get<std::string>(); }},
      {"under_null", [&](const json& v) { c.under_null = v.get<bool>(); }},
      {"backdoor", [&](const json& v) { c.backdoor = v.get<std::vector<std::string>>(); }},
      {"adjust", [&](const json& v) { c.adjust = v.get<std::vector<std::string>>(); }},
      {"dsep", [&](const json& v) { c.dsep = v.get<std::vector<std::string>>(); }},
      {"given", [&](const json& v) { c.given = v.get<std::vector<std::string>>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    std::string k = key;
    std::replace(k.begin(), k.end(), '-', '_');
    auto it = setters.find(k);
    if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

std::optional<std::string> find_config_flag(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

Pooling parse_pooling(const std::string& s) {
  if (s == "pooled") return Pooling::Pooled;
  if (s == "mean-of-replicates") return Pooling::MeanOfReplicates;
  throw UsageError("unknown pooling '" + s + "' (pooled|mean-of-replicates)");
}

// Comma-separated tokens across repeated values: {"X,Z1", "W"} -> {X, Z1, W}.
NodeSet node_set(const std::vector<std::string>& values) {
  NodeSet out;
  for (const auto& v : values) {
    std::stringstream ss(v);
    for (std::string tok; std::getline(ss, tok, ',');) {
      if (!tok.empty()) out.insert(tok);
    }
  }
  return out;
}

json provenance_block(const std::string& command, const json& config) {
  return {{"command", command}, {"version", EXCH_VERSION}, {"config", config}};
}

json simulation_config(const RunConfig& c) {
  return {{"dgp", c.dgp},
          {"gamma", c.gamma},
          {"per_group", c.per_group},
          {"replications", c.replications},
          {"seed", c.seed}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const DgpKind kind = parse_dgp_kind(c.dgp);
  std::ostringstream csv;
  json dataset;
  if (kind == DgpKind::Point) {
    const auto data = replicate_point(c.seed, c.gamma, c.per_group, c.replications, c.threads);
    write_csv(csv, data);
    dataset = provenance_to_json(data.provenance());
  } else {
    const auto data = replicate_long(c.seed, c.gamma, c.per_group, c.replications, c.threads);
    write_csv(csv, data);
    dataset = provenance_to_json(data.provenance());
  }
  if (c.output.empty()) {
    out << csv.str();
    return kExitOk;
  }
  write_file(c.output, csv.str());
  json side = provenance_block("simulate", simulation_config(c));
  side["dataset"] = dataset;
  write_file(sidecar_path(c.output).string(), dump(side));
  return kExitOk;
}

int emit_summary(const std::string& command, const SummaryTable& table, const json& config,
                 const RunConfig& c, std::ostream& out) {
  write_summary_text(out, table);
  if (!c.output.empty()) {
    std::ostringstream csv;
    write_summary_csv(csv, table);
    write_file(c.output, csv.str());
    write_file(sidecar_path(c.output).string(), dump(provenance_block(command, config)));
  }
  return kExitOk;
}

void print_gaps(std::ostream& out, const GapReport& rep) {
  for (const auto& g : rep.gaps) {
    out << "gap(" << rep.variable << ") " << g.group_a << " - " << g.group_b << " = "
        << format_double(g.gap) << '\n';
  }
}

int cmd_summarize(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw UsageError("summarize needs a dataset file");
  const AnyDataset any = load_dataset(c.input);
  json config = {{"input", c.input}, {"stratify", c.stratify}};
  SummaryTable table;
  if (const auto* p = std::get_if<PointDataset>(&any)) {
    table = group_summaries_point(*p);
  } else {
    table = group_summaries_long(std::get<LongDataset>(any), c.stratify);
  }
  emit_summary("summarize", table, config, c, out);
  out << '\n';
  print_gaps(out, exchangeability_gap(table, "u"));
  print_gaps(out, exchangeability_gap(table, "x"));
  if (c.min_count > 0) {
    const auto* p = std::get_if<PointDataset>(&any);
    if (p == nullptr) throw UsageError("--min-count applies to point datasets only");
    const auto obs = p->observed();
    const PositivityReport rep = positivity_check(obs, c.k, c.min_count);
    out << "\npositivity (min count " << rep.min_count << ", K=" << c.k << ")\n";
    for (const auto& s : rep.strata) {
      out << "  " << s.label << ": treated " << s.n_treated << ", control " << s.n_control
          << (s.flagged ? "  FLAGGED" : "") << '\n';
    }
  }
  return kExitOk;
}

int cmd_replicate(const RunConfig& c, std::ostream& out) {
  ReplicationConfig rc;
  rc.kind = parse_dgp_kind(c.dgp);
  rc.gamma = c.gamma;
  rc.per_group = c.per_group;
  rc.replications = c.replications;
  rc.master_seed = c.seed;
  rc.stratify = c.stratify;
  rc.pooling = parse_pooling(c.pooling);
  rc.threads = c.threads;
  json config = simulation_config(c);
  config["stratify"] = c.stratify;
  config["pooling"] = c.pooling;
  return emit_summary("replicate", replicate_summaries(rc), config, c, out);
}

int cmd_estimate(const RunConfig& c, std::ostream& out) {
  static const std::vector<std::string> methods = {"naive",          "standardize",    "beta-binomial",
                                                   "g-formula-mcmc", "g-formula-long", "null-paradox"};
  if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
    throw UsageError("unknown method '" + c.method +
                     "' (naive|standardize|beta-binomial|g-formula-mcmc|g-formula-long|null-paradox)");
  }
  if (c.input.empty()) throw UsageError("estimate needs a dataset file");
  const AnyDataset any = load_dataset(c.input);
  const bool point_method = c.method != "g-formula-long" && c.method != "null-paradox";

  json config = {{"method", c.method}, {"input", c.input}};
  json result;
  std::string headline;

  if (point_method) {
    const auto* data = std::get_if<PointDataset>(&any);
    if (data == nullptr) throw UsageError("method '" + c.method + "' needs a point dataset");
    const auto obs = data->observed();
    config["dataset"] = provenance_to_json(data->provenance());
    if (c.method == "naive") {
      result = to_json(naive_contrast(obs));
    } else if (c.method == "standardize") {
      config["k"] = c.k;
      result = to_json(direct_standardization(bin_x(obs, c.k)));
    } else if (c.method == "beta-binomial") {
      config["prior"] = {{"a", c.prior_a}, {"b", c.prior_b}};
      config["draws"] = c.draws;
      config["seed"] = c.seed;
      config["dichotomization"] = "event = 1{y > 0}";
      const BetaPrior prior{c.prior_a, c.prior_b};
      const BetaPosterior post = beta_binomial_update(dichotomize(obs), prior, prior);
      RngState rng = rng_new(c.seed);
      result = to_json(posterior_predictive_contrast_binary(post, c.draws, rng));
      result["posterior"] = to_json(post);
    } else {
      GFormulaConfig gc;
      gc.cap = c.k;
      gc.prior_sd = c.prior_sd;
      gc.step_scale = c.step_scale;
      gc.chains = c.chains;
      gc.mcmc.iterations = c.iterations;
      gc.mcmc.burn_in = c.burn_in;
      gc.mcmc.thinning = c.thin;
      config["k"] = c.k;
      config["prior_sd"] = c.prior_sd;
      config["mcmc"] = {{"iterations", c.iterations}, {"burn_in", c.burn_in}, {"thin", c.thin},
                        {"step_scale", c.step_scale}, {"chains", c.chains}};
      config["seed"] = c.seed;
      const GFormulaResult fit = parametric_g_formula_point(obs, gc, rng_new(c.seed));
      result = to_json(fit.estimate);
      result["acceptance_rate"] = fit.posterior.acceptance_rate;
      json means = json::object();
      for (std::size_t j = 0; j < fit.posterior.dim; ++j) {
        const auto col = fit.posterior.column(j);
        double s = 0.0;
        for (double v : col) s += v;
        means[fit.posterior.labels[j]] = s / static_cast<double>(col.size());
      }
      result["posterior_means"] = means;
    }
    headline = c.method + ": " + format_double(result["point"].get<double>()) + " (se " +
               format_double(result["mc_se"].get<double>()) + ")";
  } else {
    const auto* data = std::get_if<LongDataset>(&any);
    if (data == nullptr) throw UsageError("method '" + c.method + "' needs a longitudinal dataset");
    const auto obs = data->observed();
    config["dataset"] = provenance_to_json(data->provenance());
    if (c.method == "g-formula-long") {
      result = {{"method", "g-formula-long"}, {"regimes", json::array()}};
      const LongCellCounts cells = tabulate_long(obs);
      std::ostringstream line;
      for (int z1 : {0, 1}) {
        for (int z2 : {0, 1}) {
          const RegimeMean m = g_formula_long(cells, z1, z2);
          result["regimes"].push_back(to_json(m));
          line << "g(" << z1 << "," << z2 << ")=" << format_double(m.mean) << ' ';
        }
      }
      headline = line.str();
    } else {
      const NullParadoxReport rep = null_paradox_report(obs);
      result = to_json(rep);
      result["method"] = "null-paradox";
      headline = "delta_cond=" + format_double(rep.delta_cond) + " delta_marg(z2=0)=" +
                 format_double(rep.delta_marg[0]) + " delta_marg(z2=1)=" + format_double(rep.delta_marg[1]);
    }
  }

  result["provenance"] = provenance_block("estimate", config);
  if (c.output.empty()) {
    out << dump(result);
  } else {
    write_file(c.output, dump(result));
    out << headline << '\n';
  }
  return kExitOk;
}

int cmd_graph(const RunConfig& c, std::ostream& out) {
  if (c.figure.empty() == c.dag_file.empty()) throw UsageError("graph needs exactly one of --figure or --dag");
  std::optional<Dag> g;
  if (!c.figure.empty()) {
    g.emplace(builtin_figure(c.figure, c.under_null));
  } else {
    std::ifstream in(c.dag_file);
    if (!in) throw UsageError("cannot open DAG file '" + c.dag_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    g.emplace(parse_dag_text(ss.str()));
  }
  if (c.backdoor.empty() && c.dsep.empty()) {
    for (const auto& [p, ch] : g->edges()) out << p << " -> " << ch << '\n';
    return kExitOk;
  }
  if (!c.backdoor.empty()) {
    const BackdoorVerdict v = backdoor_check(*g, c.backdoor[0], c.backdoor[1], node_set(c.adjust));
    out << (v.satisfied ? "satisfied" : "violated: " + v.reason) << '\n';
  }
  if (!c.dsep.empty()) {
    const bool sep = d_separated(*g, node_set({c.dsep[0]}), node_set({c.dsep[1]}), node_set(c.given));
    out << (sep ? "d-separated" : "d-connected") << '\n';
  }
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::PositivityViolation: return kExitPositivity;
    case ErrorCode::ParseError:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidPrior:
    case ErrorCode::UnknownName:
    case ErrorCode::CycleDetected:
    case ErrorCode::DuplicateEdge:
      return kExitUsage;
    default: return kExitRuntime;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    if (auto path = find_config_flag(args)) apply_config_file(*path, c);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Exchangeability-based causal inference: simulation, diagnostics and estimation", "exch"};
  app.set_version_flag("--version", std::string(EXCH_VERSION));
  app.require_subcommand(1);

  auto add_common = [&c](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--threads", c.threads, "Worker threads (affects wall time only)")->check(CLI::PositiveNumber);
    sub->add_option("--config", c.config_path, "JSON file of option values; flags take precedence");
    sub->add_option("-o,--output", c.output, "Output path");
  };

  auto* simulate = app.add_subcommand("simulate", "Quota-sample a dataset and write it as CSV");
  auto* summarize = app.add_subcommand("summarize", "Group means/SDs and balance gaps of a dataset");
  auto* replicate = app.add_subcommand("replicate", "Pooled group summaries over replications");
  auto* estimate = app.add_subcommand("estimate", "Estimate a causal contrast from a dataset");
  auto* graph = app.add_subcommand("graph", "d-separation and back-door checks");

  for (auto* sub : {simulate, replicate}) {
    add_common(sub);
    sub->add_option("--dgp", c.dgp, "point | long")->check(CLI::IsMember({"point", "long"}));
    sub->add_option("--gamma", c.gamma, "Confounding strength (0 = experimental regime)");
    sub->add_option("--per-group", c.per_group, "Units kept per treatment group")->check(CLI::PositiveNumber);
    sub->add_option("--replications", c.replications, "Number of quota samples")->check(CLI::PositiveNumber);
  }
  replicate->add_flag("--stratify", c.stratify, "Add x-stratified rows (longitudinal)");
  replicate->add_option("--pooling", c.pooling, "pooled | mean-of-replicates")
      ->check(CLI::IsMember({"pooled", "mean-of-replicates"}));

  add_common(summarize);
  summarize->add_option("input", c.input, "Dataset CSV");
  summarize->add_flag("--stratify", c.stratify, "Add x-stratified rows (longitudinal)");
  summarize->add_option("--min-count", c.min_count, "Report positivity with this arm-count threshold");
  summarize->add_option("--k", c.k, "x bin cap for the positivity report")->check(CLI::NonNegativeNumber);

  add_common(estimate);
  estimate->add_option("input", c.input, "Dataset CSV");
  estimate->add_option("--method", c.method,
                       "naive | standardize | beta-binomial | g-formula-mcmc | g-formula-long | null-paradox");
  estimate->add_option("--k", c.k, "x bin cap; bins 0..K-1 plus a pooled tail")->check(CLI::NonNegativeNumber);
  estimate->add_option("--prior-a", c.prior_a, "Beta prior a (both arms)");
  estimate->add_option("--prior-b", c.prior_b, "Beta prior b (both arms)");
  estimate->add_option("--draws", c.draws, "Posterior contrast draws to attach (beta-binomial)");
  estimate->add_option("--prior-sd", c.prior_sd, "Normal prior SD of log-linear coefficients");
  estimate->add_option("--iterations", c.iterations, "Metropolis sweeps including burn-in");
  estimate->add_option("--burn-in", c.burn_in, "Discarded sweeps");
  estimate->add_option("--thin", c.thin, "Keep every n-th sweep");
  estimate->add_option("--step-scale", c.step_scale, "Proposal scale in conditional posterior SDs");
  estimate->add_option("--chains", c.chains, "Independent chains")->check(CLI::PositiveNumber);

  add_common(graph);
  graph->add_option("--figure", c.figure, "Built-in diagram");
  graph->add_option("--dag", c.dag_file, "DAG text file (one 'parent -> child' per line)");
  graph->add_flag("--under-null", c.under_null, "Drop treatment-effect arrows from a built-in diagram");
  graph->add_option("--backdoor", c.backdoor, "TREATMENT OUTCOME")->expected(2);
  graph->add_option("--adjust", c.adjust, "Adjustment set (space or comma separated)");
  graph->add_option("--dsep", c.dsep, "A B (comma-separated sets)")->expected(2);
  graph->add_option("--given", c.given, "Conditioning set");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << EXCH_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(c, out);
    if (summarize->parsed()) return cmd_summarize(c, out);
    if (replicate->parsed()) return cmd_replicate(c, out);
    if (estimate->parsed()) return cmd_estimate(c, out);
    return cmd_graph(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace exch::cli
