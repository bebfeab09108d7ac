#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "exch/cli.hpp"
#include "exch/diagnostics.hpp"
#include "exch/error.hpp"
#include "exch/graph.hpp"
#include "exch/inference.hpp"

namespace py = pybind11;
using namespace exch;

namespace {

// Column-oriented views keep the Python side free of record classes.
py::dict point_columns(const PointDataset& d) {
  std::vector<std::int64_t> x, y;
  std::vector<int> z;
  std::vector<double> u;
  for (const auto& r : d.records()) {
    x.push_back(r.x);
    z.push_back(r.z);
    y.push_back(r.y);
    u.push_back(r.u);
  }
  py::dict out;
  out["x"] = x;
  out["z"] = z;
  out["y"] = y;
  out["u"] = u;
  return out;
}

py::dict long_columns(const LongDataset& d) {
  std::vector<int> z1, x, z2;
  std::vector<std::int64_t> y;
  std::vector<double> u;
  for (const auto& r : d.records()) {
    z1.push_back(r.z1);
    x.push_back(r.x);
    z2.push_back(r.z2);
    y.push_back(r.y);
    u.push_back(r.u);
  }
  py::dict out;
  out["z1"] = z1;
  out["x"] = x;
  out["z2"] = z2;
  out["y"] = y;
  out["u"] = u;
  return out;
}

std::vector<PointObs> point_obs(const std::vector<std::int64_t>& x, const std::vector<int>& z,
                                const std::vector<std::int64_t>& y) {
  if (x.size() != z.size() || x.size() != y.size()) {
    throw Error(ErrorCode::InvalidParameter, "x, z and y must have the same length");
  }
  std::vector<PointObs> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (z[i] != 0 && z[i] != 1) throw Error(ErrorCode::InvalidParameter, "z must be 0 or 1");
    out[i] = {x[i], z[i], y[i]};
  }
  return out;
}

std::vector<LongObs> long_obs(const std::vector<int>& z1, const std::vector<int>& x, const std::vector<int>& z2,
                              const std::vector<std::int64_t>& y) {
  if (z1.size() != x.size() || x.size() != z2.size() || x.size() != y.size()) {
    throw Error(ErrorCode::InvalidParameter, "z1, x, z2 and y must have the same length");
  }
  std::vector<LongObs> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int v : {z1[i], x[i], z2[i]}) {
      if (v != 0 && v != 1) throw Error(ErrorCode::InvalidParameter, "z1, x and z2 must be 0 or 1");
    }
    out[i] = {z1[i], x[i], z2[i], y[i]};
  }
  return out;
}

py::dict estimate_dict(const ContrastEstimate& e) {
  py::dict d;
  d["method"] = e.method;
  d["point"] = e.point;
  d["mc_se"] = e.mc_se;
  d["draws"] = e.draws;
  d["posterior_sd"] = e.posterior_sd ? py::cast(*e.posterior_sd) : py::none();
  d["effective_size"] = e.effective_size ? py::cast(*e.effective_size) : py::none();
  return d;
}

py::list table_rows(const SummaryTable& t) {
  py::list rows;
  for (const auto& r : t.rows) {
    py::dict d;
    d["group"] = r.group;
    d["variable"] = r.variable;
    d["mean"] = r.mean;
    d["sd"] = r.sd;
    d["n"] = r.n;
    rows.append(d);
  }
  return rows;
}

Dag graph_from(const py::object& figure, bool under_null) {
  if (py::isinstance<py::str>(figure)) {
    const std::string s = figure.cast<std::string>();
    if (s.find("->") != std::string::npos) return parse_dag_text(s);
    return builtin_figure(s, under_null);
  }
  throw Error(ErrorCode::InvalidParameter, "graph must be a built-in figure name or DAG text");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the exchangeability toolkit";
  m.attr("__version__") = EXCH_VERSION;

  static py::exception<Error> exch_error(m, "ExchError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = exch_error;
      py::object inst = err(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  m.def(
      "simulate_point",
      [](std::uint64_t seed, double gamma, std::int64_t per_group, std::int64_t replications, int threads) {
        return point_columns(replicate_point(seed, gamma, per_group, replications, threads));
      },
      py::arg("seed"), py::arg("gamma"), py::arg("per_group") = 250, py::arg("replications") = 1,
      py::arg("threads") = 1, "Quota-sampled point-treatment data as columns x, z, y, u.");

  m.def(
      "simulate_long",
      [](std::uint64_t seed, double gamma, std::int64_t per_group, std::int64_t replications, int threads) {
        return long_columns(replicate_long(seed, gamma, per_group, replications, threads));
      },
      py::arg("seed"), py::arg("gamma"), py::arg("per_group") = 500, py::arg("replications") = 1,
      py::arg("threads") = 1, "Quota-sampled two-time-point data as columns z1, x, z2, y, u.");

  m.def(
      "replicate_summaries",
      [](const std::string& dgp, double gamma, std::int64_t per_group, std::int64_t replications,
         std::uint64_t seed, bool stratify, bool mean_of_replicates, int threads) {
        ReplicationConfig cfg;
        cfg.kind = parse_dgp_kind(dgp);
        cfg.gamma = gamma;
        cfg.per_group = per_group;
        cfg.replications = replications;
        cfg.master_seed = seed;
        cfg.stratify = stratify;
        cfg.pooling = mean_of_replicates ? Pooling::MeanOfReplicates : Pooling::Pooled;
        cfg.threads = threads;
        py::gil_scoped_release release;
        SummaryTable t = replicate_summaries(cfg);
        py::gil_scoped_acquire acquire;
        return table_rows(t);
      },
      py::arg("dgp"), py::arg("gamma"), py::arg("per_group"), py::arg("replications"), py::arg("seed") = 0,
      py::arg("stratify") = false, py::arg("mean_of_replicates") = false, py::arg("threads") = 1,
      "Group mean/SD rows over quota-sampled replications.");

  m.def(
      "naive_contrast",
      [](const std::vector<std::int64_t>& x, const std::vector<int>& z, const std::vector<std::int64_t>& y) {
        return estimate_dict(naive_contrast(point_obs(x, z, y)));
      },
      py::arg("x"), py::arg("z"), py::arg("y"));

  m.def(
      "direct_standardization",
      [](const std::vector<std::int64_t>& x, const std::vector<int>& z, const std::vector<std::int64_t>& y, int k) {
        return estimate_dict(direct_standardization(bin_x(point_obs(x, z, y), k)));
      },
      py::arg("x"), py::arg("z"), py::arg("y"), py::arg("k") = 8);

  m.def(
      "beta_binomial_contrast",
      [](std::int64_t events1, std::int64_t trials1, std::int64_t events0, std::int64_t trials0, double a, double b) {
        const BetaPosterior post = beta_binomial_update({{events1, trials1}, {events0, trials0}}, {a, b}, {a, b});
        py::dict d = estimate_dict(posterior_predictive_contrast_binary(post));
        d["posterior"] = py::make_tuple(post.a1, post.b1, post.a0, post.b0);
        return d;
      },
      py::arg("events1"), py::arg("trials1"), py::arg("events0"), py::arg("trials0"), py::arg("a") = 1.0,
      py::arg("b") = 1.0, "Posterior predictive contrast of two Beta-binomial arms.");

  m.def(
      "g_formula_point",
      [](const std::vector<std::int64_t>& x, const std::vector<int>& z, const std::vector<std::int64_t>& y,
         std::uint64_t seed, int k, double prior_sd, std::int64_t iterations, std::int64_t burn_in, int chains) {
        const auto obs = point_obs(x, z, y);
        GFormulaConfig cfg;
        cfg.cap = k;
        cfg.prior_sd = prior_sd;
        cfg.chains = chains;
        cfg.mcmc.iterations = iterations;
        cfg.mcmc.burn_in = burn_in;
        py::gil_scoped_release release;
        GFormulaResult r = parametric_g_formula_point(obs, cfg, rng_new(seed));
        py::gil_scoped_acquire acquire;
        py::dict d = estimate_dict(r.estimate);
        d["acceptance_rate"] = r.posterior.acceptance_rate;
        d["labels"] = r.posterior.labels;
        return d;
      },
      py::arg("x"), py::arg("z"), py::arg("y"), py::arg("seed") = 0, py::arg("k") = 8, py::arg("prior_sd") = 10.0,
      py::arg("iterations") = 20000, py::arg("burn_in") = 2000, py::arg("chains") = 1,
      "Bayesian g-formula with a Poisson outcome model saturated in x bins.");

  m.def(
      "null_paradox_report",
      [](const std::vector<int>& z1, const std::vector<int>& x, const std::vector<int>& z2,
         const std::vector<std::int64_t>& y) {
        const NullParadoxReport r = null_paradox_report(long_obs(z1, x, z2, y));
        py::dict d;
        d["delta_cond"] = r.delta_cond;
        d["delta_cond_se"] = r.delta_cond_se;
        d["delta_marg"] = py::make_tuple(r.delta_marg[0], r.delta_marg[1]);
        py::dict regimes;
        for (const auto& g : r.regimes) regimes[py::make_tuple(g.z1, g.z2)] = py::make_tuple(g.mean, g.se);
        d["regimes"] = regimes;
        return d;
      },
      py::arg("z1"), py::arg("x"), py::arg("z2"), py::arg("y"));

  m.def(
      "d_separated",
      [](const py::object& graph, const NodeSet& a, const NodeSet& b, const NodeSet& given, bool under_null) {
        return d_separated(graph_from(graph, under_null), a, b, given);
      },
      py::arg("graph"), py::arg("a"), py::arg("b"), py::arg("given") = NodeSet{}, py::arg("under_null") = false,
      "`graph` is a built-in figure name or DAG text ('A -> B' lines).");

  m.def(
      "backdoor_check",
      [](const py::object& graph, const std::string& treatment, const std::string& outcome, const NodeSet& adjust,
         bool under_null) {
        const BackdoorVerdict v = backdoor_check(graph_from(graph, under_null), treatment, outcome, adjust);
        return py::make_tuple(v.satisfied, v.reason);
      },
      py::arg("graph"), py::arg("treatment"), py::arg("outcome"), py::arg("adjust") = NodeSet{},
      py::arg("under_null") = false, "Returns (satisfied, reason).");

  m.def("figure_names", &builtin_figure_names);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
