#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "fdstab/cauchy.hpp"
#include "fdstab/errors.hpp"
#include "fdstab/forms.hpp"
#include "fdstab/frequency_forms.hpp"
#include "fdstab/ibvp.hpp"
#include "fdstab/report.hpp"
#include "fdstab/scheme.hpp"
#include "fdstab/trace.hpp"

namespace {

using namespace fdstab;

struct Options {
  std::string scheme_path;
  int grid = 0;  // 0 picks the per-command default
  int steps = 0;
  std::vector<double> gamma = {1.0};
  std::vector<double> dt = {0.02};
  double epsilon = 0.125;
  double cluster_radius = 1e-6;
  int p1 = 5;
  double r0 = std::exp(1.0);
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
};

int resolved(int flag_value, int fallback) {
  return flag_value > 0 ? flag_value : fallback;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OrderedJson complex_json(Complex z) {
  return OrderedJson::array({z.real(), z.imag()});
}

OrderedJson matrix_json(const Eigen::MatrixXcd& mat) {
  OrderedJson rows = OrderedJson::array();
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      row.push_back(complex_json(mat(i, j)));
    }
    rows.push_back(row);
  }
  return rows;
}

OrderedJson config_echo(const SchemeDef& scheme, const Options& opt, int grid,
                        int steps) {
  OrderedJson config = OrderedJson::object();
  config["scheme"] = opt.scheme_path;
  config["scheme_name"] = scheme.name;
  config["dim"] = scheme.dim;
  config["s"] = scheme.s;
  config["r"] = scheme.r;
  config["p"] = scheme.p;
  config["grid"] = grid;
  config["steps"] = steps;
  config["gamma"] = opt.gamma;
  config["dt"] = opt.dt;
  config["epsilon"] = opt.epsilon;
  config["cluster_radius"] = opt.cluster_radius;
  config["p1"] = opt.p1;
  config["r0"] = opt.r0;
  config["seed"] = opt.seed;
  return config;
}

OrderedJson crossing_json(const Crossing& crossing) {
  OrderedJson entry = OrderedJson::object();
  entry["theta"] = crossing.theta;
  OrderedJson groups = OrderedJson::array();
  for (const RootGroup& group : crossing.groups) {
    OrderedJson g = OrderedJson::object();
    g["root"] = complex_json(group.value);
    g["multiplicity"] = group.multiplicity;
    groups.push_back(g);
  }
  entry["groups"] = groups;
  return entry;
}

Report cmd_analyze(const SchemeDef& scheme, const Options& opt) {
  const int grid = resolved(opt.grid, 256);
  const int steps = resolved(opt.steps, 100);
  Report rep;
  rep.command = "analyze";
  rep.config = config_echo(scheme, opt, grid, steps);

  const RootClassification cls =
      classify_roots(scheme, grid, opt.cluster_radius);
  const EdgeSymbolAudit a2 = audit_edge_symbols(scheme);
  const PowerBoundScan pw = power_bound_scan(scheme, grid, steps);

  rep.add_check("root_modulus_max", cls.max_root_modulus, 1.0 + 1e-10,
                cls.max_root_modulus <= 1.0 + 1e-10);
  rep.add_flag("unimodular_roots_simple", cls.pass);
  rep.add_check("edge_symbol_root_max", a2.worst_modulus, 1.0 - 1e-6, a2.pass);
  rep.add_check("power_bound_max", pw.max_norm, 1e12, !pw.capped);

  rep.results["crossing_count"] = cls.crossings.size();
  OrderedJson crossings = OrderedJson::array();
  for (const Crossing& crossing : cls.crossings) {
    crossings.push_back(crossing_json(crossing));
  }
  rep.results["crossings"] = crossings;
  rep.results["power_bound_argmax"] = pw.argmax_index;
  return rep;
}

Report cmd_forms(const SchemeDef& scheme, const Options& opt) {
  const int grid = resolved(opt.grid, 64);
  Report rep;
  rep.command = "forms";
  rep.config = config_echo(scheme, opt, grid, 0);

  FormTableOptions fopt;
  fopt.epsilon = opt.epsilon;
  fopt.cluster_radius = opt.cluster_radius;
  const FormTable table = build_form_table(scheme, grid, fopt);

  rep.add_check("qe_min", table.qe_min, 0.0, table.qe_min > 0.0);
  rep.add_check("qd_min", table.qd_min, -1e-12, table.qd_min >= -1e-12);

  // Spot check of the balance identity along random trajectories at a few
  // frequencies, all drawn from the seeded generator.
  std::mt19937_64 gen(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const int idx = static_cast<int>(
        gen() % static_cast<std::uint64_t>(table.grid.size()));
    const Poly p = scheme.dispersion_poly(table.grid.theta(idx));
    std::vector<Complex> traj(static_cast<std::size_t>(p.degree()) + 4);
    for (auto& v : traj) {
      v = Complex(gauss(gen), gauss(gen));
    }
    worst = std::max(
        worst, balance_residual(p, table.forms[static_cast<std::size_t>(idx)], traj));
  }
  rep.add_check("balance_residual_max", worst, 1e-10, worst <= 1e-10);

  OrderedJson regimes = OrderedJson::object();
  regimes["simple"] = table.regime_counts[0];
  regimes["multiple"] = table.regime_counts[1];
  regimes["near_crossing"] = table.regime_counts[2];
  regimes["degree2"] = table.regime_counts[3];
  rep.results["regimes"] = regimes;
  rep.results["argmin_qe"] = table.argmin_qe;

  const RootClassification cls =
      classify_roots(scheme, grid, opt.cluster_radius);
  OrderedJson crossings = OrderedJson::array();
  for (const Crossing& crossing : cls.crossings) {
    const HermitianFormPair pair = forms_at_frequency(scheme, crossing.theta, fopt);
    OrderedJson entry = crossing_json(crossing);
    entry["regime"] = regime_name(pair.regime);
    entry["epsilon"] =
        pair.epsilon ? OrderedJson(*pair.epsilon) : OrderedJson(nullptr);
    entry["qe"] = matrix_json(pair.qe);
    entry["qd"] = matrix_json(pair.qd);
    crossings.push_back(entry);
  }
  rep.results["crossings"] = crossings;
  return rep;
}

Report cmd_cauchy(const SchemeDef& scheme, const Options& opt, std::string* csv) {
  const int grid = resolved(opt.grid, 128);
  const int steps = resolved(opt.steps, 200);
  Report rep;
  rep.command = "cauchy";
  rep.config = config_echo(scheme, opt, grid, steps);

  FormTableOptions fopt;
  fopt.epsilon = opt.epsilon;
  fopt.cluster_radius = opt.cluster_radius;
  const CauchyRun run = run_cauchy(scheme, grid, steps, opt.seed, fopt);

  rep.add_check("balance_residual_max", run.balance_max, 1e-10,
                run.balance_max <= 1e-10);
  rep.add_check("energy_growth_max", run.growth_max, 1e-12 * (1.0 + run.energy0),
                run.growth_max <= 1e-12 * (1.0 + run.energy0));
  rep.add_check("operator_residual_max", run.residual_max, 1e-8,
                run.residual_max <= 1e-8);

  rep.results["energy_initial"] = run.energy0;
  rep.results["energy_final"] = run.rows.back().energy;
  rep.results["energy_drift_max"] = run.drift_max;

  if (csv != nullptr) {
    *csv = "step,E,D,sup_norm,L_residual\n";
    for (const EnergySeriesRow& row : run.rows) {
      *csv += std::to_string(row.step) + "," + fmt(row.energy) + "," +
              fmt(row.dissipation) + "," + fmt(row.sup_norm) + "," +
              fmt(row.scheme_residual) + "\n";
    }
  }
  return rep;
}

void add_sweep_checks(Report& rep, const std::vector<EstimateReport>& sweep,
                      std::size_t n_gamma, const char* which) {
  // ratios at different gamma are not comparable (the weight floor enters the
  // estimate constant), so the spread is measured across dt at fixed gamma
  double spread = 1.0;
  bool finite = true;
  for (std::size_t g = 0; g < n_gamma; ++g) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t count = 0;
    for (std::size_t i = g; i < sweep.size(); i += n_gamma) {
      const double ratio = std::string(which) == "strong"
                               ? sweep[i].strong_ratio
                               : sweep[i].semigroup_ratio;
      finite = finite && std::isfinite(ratio);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++count;
    }
    if (lo > 0.0 && count > 1) {
      spread = std::max(spread, hi / lo);
    }
  }
  rep.add_check(std::string(which) + "_ratio_spread", spread, 1.5, spread <= 1.5);
  rep.add_flag(std::string(which) + "_ratio_finite", finite);
}

OrderedJson estimate_json(const EstimateReport& est, double dt, double gamma) {
  OrderedJson entry = OrderedJson::object();
  entry["dt"] = dt;
  entry["gamma"] = gamma;
  entry["interior_sum"] = est.interior_sum;
  entry["trace_sum"] = est.trace_sum;
  entry["forcing_sum"] = est.forcing_sum;
  entry["boundary_sum"] = est.boundary_sum;
  entry["initial_sum"] = est.initial_sum;
  entry["sup_weighted"] = est.sup_weighted;
  entry["strong_ratio"] = est.strong_ratio;
  entry["semigroup_ratio"] = est.semigroup_ratio;
  return entry;
}

void series_csv(const HalfSpaceRun& run, const SchemeDef& scheme, double gamma,
                std::string* csv) {
  *csv = "step,interior_weighted,trace_weighted,sup_so_far\n";
  const int r1 = scheme.r[0];
  const int q1 = scheme.q1;
  double sup = 0.0;
  for (std::size_t n = 0; n < run.history.size(); ++n) {
    const Eigen::VectorXcd& u = run.history[n];
    const double weight = std::exp(-2.0 * gamma * static_cast<double>(n) * run.dt);
    const double interior = weight * run.dx * u.squaredNorm();
    double trace = 0.0;
    for (int j = 1 - r1; j <= 1 + q1; ++j) {
      trace += std::norm(u(j - run.j_min));
    }
    trace *= weight;
    sup = std::max(sup, interior);
    *csv += std::to_string(n) + "," + fmt(interior) + "," + fmt(trace) + "," +
            fmt(sup) + "\n";
  }
}

Report cmd_ibvp(const SchemeDef& scheme, const Options& opt, bool auxiliary,
                std::string* csv) {
  const int J_base = resolved(opt.grid, 64);
  const int steps_base = resolved(opt.steps, 100);
  const int buffer_margin = 20;
  const double dt_max = *std::max_element(opt.dt.begin(), opt.dt.end());
  Report rep;
  rep.command = auxiliary ? "aux" : "ibvp";
  rep.config = config_echo(scheme, opt, J_base, steps_base);
  rep.config["buffer_margin"] = auxiliary ? buffer_margin : 0;

  std::vector<EstimateReport> sweep;
  OrderedJson entries = OrderedJson::array();
  bool first = true;
  for (double dt : opt.dt) {
    // --grid and --steps size the coarsest run; finer dt refine the same
    // physical domain and horizon, otherwise the sweep values are not
    // comparable
    const double scale = dt_max / dt;
    const int J = static_cast<int>(std::lround(J_base * scale));
    const int steps = static_cast<int>(std::lround(steps_base * scale));
    const IbvpEngine engine(scheme, J, dt);
    const IbvpData data =
        engine.smooth_data(steps, true, true, !auxiliary);
    // support grows at most one cell per step, so this buffer keeps the
    // truncated end out of reach for the whole run
    const int buffer = steps + buffer_margin;
    const HalfSpaceRun run =
        auxiliary ? engine.run_aux(data, buffer) : engine.run_direct(data);
    for (double gamma : opt.gamma) {
      const EstimateReport est = engine.measure_estimates(run, data, gamma);
      sweep.push_back(est);
      OrderedJson entry = estimate_json(est, dt, gamma);
      entry["J"] = J;
      entry["steps"] = steps;
      if (auxiliary) {
        entry["buffer"] = buffer;
      }
      entries.push_back(entry);
    }
    if (first && csv != nullptr) {
      series_csv(run, scheme, opt.gamma.front(), csv);
      first = false;
    }
  }

  add_sweep_checks(rep, sweep, opt.gamma.size(), "strong");
  add_sweep_checks(rep, sweep, opt.gamma.size(), "semigroup");
  rep.results["sweep"] = entries;
  return rep;
}

Report cmd_trace(const SchemeDef& scheme, const Options& opt) {
  const int samples = resolved(opt.steps, 1000);
  Report rep;
  rep.command = "trace";
  rep.config = config_echo(scheme, opt, 0, samples);

  const MarginScan mscan =
      central_margin_scan(scheme, samples, opt.r0, opt.seed, 1e-3, 8);
  const TraceScan tscan = trace_scan(scheme, samples, opt.p1, opt.r0, opt.seed);
  const TraceScan tscan2 =
      trace_scan(scheme, 2 * samples, opt.p1, opt.r0, opt.seed);

  rep.add_check("central_margin_min", mscan.min_margin, 1e-3, mscan.pass);
  const bool finite = std::isfinite(tscan.max_ratio) && tscan.max_ratio > 0.0 &&
                      tscan.max_ratio < 1e6;
  rep.add_check("trace_ratio_max", tscan.max_ratio, 1e6, finite);
  const double doubling =
      tscan.max_ratio > 0.0 ? tscan2.max_ratio / tscan.max_ratio : 1.0;
  rep.add_check("trace_ratio_doubling", doubling, 2.0, doubling <= 2.0);
  rep.add_check("trace_counterexamples",
                static_cast<double>(tscan.counterexamples + tscan2.counterexamples),
                0.5, tscan.counterexamples + tscan2.counterexamples == 0);

  rep.results["margin_worst_z"] = complex_json(mscan.worst_z);
  rep.results["margin_samples"] = mscan.samples;
  rep.results["trace_worst_z"] = complex_json(tscan2.worst_z);
  rep.results["trace_samples"] = tscan2.samples;
  return rep;
}

Report cmd_superpose(const SchemeDef& scheme, const Options& opt) {
  const int J = resolved(opt.grid, 64);
  const int steps = resolved(opt.steps, 40);
  const int buffer = 20;
  const double dt = opt.dt.front();
  Report rep;
  rep.command = "superpose";
  rep.config = config_echo(scheme, opt, J, steps);
  rep.config["buffer"] = buffer;

  const IbvpEngine engine(scheme, J, dt);
  const IbvpData data = engine.smooth_data(steps, true, true, true);
  const IbvpEngine::Superposition sup = engine.superpose(data, buffer);

  rep.add_check("superposition_max_diff", sup.max_diff, 1e-10,
                sup.max_diff <= 1e-10);
  rep.results["dt"] = dt;
  rep.results["truncation_activity_aux"] = sup.aux.truncation_activity;
  return rep;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy certificates and stability measurements for multistep "
               "difference schemes"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--scheme", opt.scheme_path, "scheme definition file")
      ->required();
  app.add_option("--grid", opt.grid, "frequency grid size / spatial extent")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--steps", opt.steps, "time steps or scan samples")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--gamma", opt.gamma, "weight exponents (comma separated)")
      ->delimiter(',');
  app.add_option("--dt", opt.dt, "time step sizes (comma separated)")
      ->delimiter(',');
  app.add_option("--epsilon", opt.epsilon, "auxiliary term weight base");
  app.add_option("--cluster-radius", opt.cluster_radius,
                 "root clustering radius");
  app.add_option("--p1", opt.p1, "trace window cutoff");
  app.add_option("--r0", opt.r0, "outer modulus for resolvent sampling");
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--out", opt.out, "report file (default stdout)");
  app.add_option("--csv", opt.csv, "time series file");

  const char* names[] = {"analyze", "forms",  "cauchy",    "ibvp",
                         "aux",     "trace",  "superpose"};
  const char* descs[] = {
      "dispersion root classification and edge symbol audit",
      "energy/dissipation form table with certificates",
      "periodic evolution with the energy balance ledger",
      "half-space run with weighted estimate ratios",
      "auxiliary whole-line run with weighted estimate ratios",
      "resolvent margin and trace ratio scans",
      "auxiliary/boundary superposition identity check"};
  for (int k = 0; k < 7; ++k) {
    app.add_subcommand(names[k], descs[k])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    const SchemeDef scheme = SchemeDef::load(opt.scheme_path);
    Report rep;
    std::string csv;
    std::string* csv_sink = opt.csv.empty() ? nullptr : &csv;
    if (command == "analyze") {
      rep = cmd_analyze(scheme, opt);
    } else if (command == "forms") {
      rep = cmd_forms(scheme, opt);
    } else if (command == "cauchy") {
      rep = cmd_cauchy(scheme, opt, csv_sink);
    } else if (command == "ibvp") {
      rep = cmd_ibvp(scheme, opt, false, csv_sink);
    } else if (command == "aux") {
      rep = cmd_ibvp(scheme, opt, true, csv_sink);
    } else if (command == "trace") {
      rep = cmd_trace(scheme, opt);
    } else {
      rep = cmd_superpose(scheme, opt);
    }

    write_output(opt.out, rep.to_text());
    if (csv_sink != nullptr) {
      write_output(opt.csv, csv);
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    std::fprintf(stderr, "%s: %s in %.3f s\n", command.c_str(),
                 rep.all_pass() ? "pass" : "FAIL", elapsed.count());
    return rep.all_pass() ? 0 : 1;
  } catch (const Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return errc_is_hypothesis(err.code()) ? 3 : 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
}
