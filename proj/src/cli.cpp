#include "cexp/cli.hpp"

#include "cexp/bounds.hpp"
#include "cexp/error.hpp"
#include "cexp/io.hpp"
#include "cexp/loschmidt.hpp"
#include "cexp/obs_dynamics.hpp"
#include "cexp/oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

namespace cexp::cli {

namespace {

using io::Json;

struct Common {
  int workers = 0;
  bool force = false;
  bool timing = false;
  std::string out;
};

struct Inputs {
  std::vector<std::string> hams;
  std::string state;
  std::string obs;
  std::vector<std::string> times;
  double time = 0.0;
  std::optional<int> order;
  std::optional<double> epsilon;
  std::string mode = "short";
  bool imaginary = false;
  std::string what;
  std::string variant = "product";
  double delta = 0.0;
  int points = 10;
  double fraction = 0.9;
};

Json estimate_json(const Estimate& e, bool include_contributions) {
  Json j;
  j["value"] = io::complex_to_json(e.value);
  j["order"] = e.order;
  j["truncation_bound"] = io::number_or_null(e.truncation_bound);
  j["within_radius"] = e.within_radius;
  j["threshold"] = e.threshold;
  j["ratio"] = e.ratio;
  j["degree"] = e.degree;
  j["effective_degree"] = e.effective_degree;
  j["clusters_per_order"] = e.clusters_per_order;
  if (include_contributions) {
    Json c = Json::array();
    for (const auto& z : e.order_contributions) c.push_back(io::complex_to_json(z));
    j["order_contributions"] = c;
  }
  return j;
}

void require_set(const std::string& value, const char* flag) {
  if (value.empty()) fail(ErrorKind::Usage, std::string("missing required option ") + flag);
}

const std::string& single_ham(const Inputs& in) {
  if (in.hams.size() != 1) fail(ErrorKind::Usage, "exactly one --ham is required");
  return in.hams[0];
}

ExpansionOptions options(const Common& c) {
  ExpansionOptions o;
  o.workers = c.workers;
  return o;
}

Json cmd_thresholds(const Inputs& in) {
  const auto h = io::load_hamiltonian(single_ham(in));
  const Thresholds th = thresholds(h);
  return Json{{"max_degree", th.degree},
              {"effective_degree", th.effective_degree},
              {"degree_floored", th.degree < 1},
              {"t_star", th.t_star},
              {"t_star_L", th.t_star_L},
              {"terms", h.size()},
              {"sites", h.sites()}};
}

Json cmd_observable(const Inputs& in, const Common& c) {
  const auto h = io::load_hamiltonian(single_ham(in));
  require_set(in.state, "--state");
  require_set(in.obs, "--obs");
  const auto rho = io::load_state(in.state);
  const auto a = io::load_observable(in.obs);
  const ExpansionOptions opts = options(c);
  Json j;
  j["mode"] = in.mode;
  j["time"] = in.time;
  if (in.mode == "continued") {
    if (!in.epsilon) fail(ErrorKind::Usage, "continued mode needs --epsilon");
    if (in.order) fail(ErrorKind::Usage, "continued mode takes --epsilon only");
    const Estimate e = continue_observable(h, a, rho, in.time, *in.epsilon, opts);
    j["epsilon"] = *in.epsilon;
    j["estimate"] = estimate_json(e, false);
    j["certified"] = true;
    return j;
  }
  if (in.mode != "short") fail(ErrorKind::Usage, "--mode must be short or continued");
  if (in.order.has_value() == in.epsilon.has_value())
    fail(ErrorKind::Usage, "give exactly one of --order and --epsilon");
  const auto og = observable_graph(h, a);
  const Thresholds th = thresholds(og.graph.max_degree);
  const bool inside = std::abs(in.time) < th.t_star;
  if (!inside && !c.force)
    fail(ErrorKind::OutsideRadius, "|t| is not below t* = " + std::to_string(th.t_star) + "; use --force");
  int order;
  if (in.order) {
    order = *in.order;
  } else {
    if (!inside) fail(ErrorKind::Usage, "--epsilon cannot pick an order outside the radius; give --order");
    order = observable_order_for_epsilon(in.time, th.t_star, th.effective_degree, a.norm(), *in.epsilon);
  }
  const Estimate e = expand_observable(h, a, rho, in.time, order, opts);
  j["estimate"] = estimate_json(e, true);
  j["certified"] = inside;
  return j;
}

int order_for(const Inputs& in, double ratio, std::size_t terms) {
  if (in.order && in.epsilon) fail(ErrorKind::Usage, "give at most one of --order and --epsilon");
  if (in.order) return *in.order;
  if (in.epsilon) return loschmidt_order_for_epsilon(ratio, terms, *in.epsilon);
  return 8;
}

Json cmd_loschmidt(const Inputs& in, const Common& c) {
  const auto h = io::load_hamiltonian(single_ham(in));
  require_set(in.state, "--state");
  const auto rho = io::load_state(in.state);
  const Complex t = in.imaginary ? Complex(0.0, in.time) : Complex(in.time, 0.0);
  const Thresholds th = thresholds(h);
  const double ratio = std::abs(t) / th.t_star_L;
  const bool inside = ratio < 1.0;
  if (!inside && !c.force)
    fail(ErrorKind::OutsideRadius, "|t| is not below t*_L = " + std::to_string(th.t_star_L) + "; use --force");
  if (!inside && in.epsilon && !in.order) fail(ErrorKind::Usage, "--epsilon cannot pick an order outside the radius");
  const int order = order_for(in, ratio, h.size());
  const Estimate e = expand_logL(h, rho, t, order, options(c));
  Json j;
  j["time"] = io::complex_to_json(t);
  j["estimate"] = estimate_json(e, true);
  j["certified"] = inside;
  j["per_site_rate"] = io::complex_to_json(e.value / static_cast<double>(h.sites()));
  if (inside) {
    const Certificate cert = multiplicative_certificate(e.value, e.truncation_bound);
    j["magnitude_lower"] = cert.lower;
    j["magnitude_upper"] = cert.upper;
  }
  return j;
}

Json cmd_multi(const Inputs& in, const Common& c) {
  if (in.hams.empty()) fail(ErrorKind::Usage, "at least one --ham is required");
  if (in.hams.size() != in.times.size()) fail(ErrorKind::Usage, "give one --time per --ham");
  require_set(in.state, "--state");
  MultiEchoSpec spec;
  for (const auto& p : in.hams) spec.hamiltonians.push_back(io::load_hamiltonian(p));
  for (const auto& t : in.times) spec.times.push_back(io::parse_complex(t));
  const auto rho = io::load_state(in.state);
  validate_multi_echo(spec, rho);
  const LabeledSystem sys = make_labeled_system(spec);
  const Thresholds th = thresholds(sys.base_graph.max_degree);
  double sum_t = 0.0;
  for (const auto& t : spec.times) sum_t += std::abs(t);
  const double tau = static_cast<double>(spec.times.size()) * sum_t / th.t_star_L;
  const bool inside = tau < 1.0;
  if (!inside && !c.force) fail(ErrorKind::OutsideRadius, "tau = " + std::to_string(tau) + " is not below 1; use --force");
  if (!inside && in.epsilon && !in.order) fail(ErrorKind::Usage, "--epsilon cannot pick an order outside the radius");
  const int order = order_for(in, tau, sys.base_supports.size());
  const Estimate e = expand_logL_multi(spec, rho, order, options(c));
  Json times = Json::array();
  for (const auto& t : spec.times) times.push_back(io::complex_to_json(t));
  Json j;
  j["times"] = times;
  j["estimate"] = estimate_json(e, true);
  j["certified"] = inside;
  return j;
}

Json cmd_exact(const Inputs& in) {
  if (in.hams.empty() || in.hams.size() > 2) fail(ErrorKind::Usage, "give one or two --ham");
  require_set(in.state, "--state");
  const auto h = io::load_hamiltonian(in.hams[0]);
  const auto rho = io::load_state(in.state);
  Json j;
  j["what"] = in.what;
  if (in.what == "observable") {
    require_set(in.obs, "--obs");
    const auto a = io::load_observable(in.obs);
    j["time"] = in.time;
    j["value"] = io::complex_to_json(exact_observable(h, a, rho, in.time));
  } else if (in.what == "loschmidt") {
    const Complex t = in.imaginary ? Complex(0.0, in.time) : Complex(in.time, 0.0);
    const Complex l = exact_loschmidt(h, rho, t);
    j["time"] = io::complex_to_json(t);
    j["value"] = io::complex_to_json(l);
    j["log_value"] = io::complex_to_json(std::log(l));
  } else if (in.what == "distribution") {
    const auto measured = in.hams.size() == 2 ? io::load_hamiltonian(in.hams[1]) : h;
    const Matrix state = evolved_density(h, rho, in.time);
    Json levels = Json::array();
    for (const auto& lvl : exact_measurement_distribution(measured, state))
      levels.push_back({{"energy", lvl.energy}, {"probability", lvl.probability}});
    j["time"] = in.time;
    j["levels"] = levels;
  } else {
    fail(ErrorKind::Usage, "--what must be observable, loschmidt or distribution");
  }
  return j;
}

Json cmd_concentration(const Inputs& in) {
  if (in.hams.empty() || in.hams.size() > 2) fail(ErrorKind::Usage, "give one or two --ham");
  std::vector<LocalHamiltonian> hs;
  for (const auto& p : in.hams) hs.push_back(io::load_hamiltonian(p));
  std::vector<Support> supports;
  for (const auto& h : hs)
    for (const auto& s : h.supports())
      if (std::find(supports.begin(), supports.end(), s) == supports.end()) supports.push_back(s);
  const auto ig = build_interaction_graph(supports);
  ConcentrationVariant variant;
  if (in.variant == "product") variant = ConcentrationVariant::Product;
  else if (in.variant == "evolved") variant = ConcentrationVariant::Evolved;
  else fail(ErrorKind::Usage, "--variant must be product or evolved");
  const auto r = concentration_bound(variant, in.delta, supports.size(), ig.effective_degree(), in.time);
  return Json{{"variant", in.variant}, {"delta", r.delta},     {"time", r.time},       {"nu", r.nu},
              {"bound", r.bound},      {"raw_bound", r.raw_bound}, {"clamped", r.clamped}, {"t_star_L", r.t_star_L},
              {"terms", r.terms}};
}

Json cmd_qsl(const Inputs& in) {
  const auto h = io::load_hamiltonian(single_ham(in));
  require_set(in.state, "--state");
  const auto rho = io::load_state(in.state);
  const QslReport r = qsl_report(h, rho, in.time);
  return Json{{"time", r.t},
              {"lower_bound", r.lower_bound},
              {"energy_variance", r.energy_variance},
              {"mean_energy", r.mean_energy},
              {"t_qsl_floor", r.t_qsl_floor},
              {"mt_ml_bound", io::number_or_null(r.mt_ml_bound)}};
}

Json cmd_dpt_scan(const Inputs& in, const Common& c) {
  const auto h = io::load_hamiltonian(single_ham(in));
  require_set(in.state, "--state");
  const auto rho = io::load_state(in.state);
  if (in.points < 1) fail(ErrorKind::Usage, "--points must be positive");
  if (!(in.fraction > 0.0 && in.fraction < 1.0)) fail(ErrorKind::Usage, "--fraction must lie in (0, 1)");
  const int order = in.order.value_or(6);
  const Thresholds th = thresholds(h);
  Json rows = Json::array();
  for (int k = 0; k < in.points; ++k) {
    const double t = in.fraction * th.t_star_L * k / in.points;
    const SiteRate r = per_site_rate(h, rho, t, order, options(c));
    rows.push_back({{"time", t}, {"rate", io::complex_to_json(r.rate)}, {"bound", r.bound}});
  }
  return Json{{"order", order}, {"t_star_L", th.t_star_L}, {"points", rows}};
}

void emit_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << Json{{"schema", 1}, {"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster expansions for short-time quantum dynamics"};
  app.require_subcommand(1);
  Common common;
  Inputs in;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", common.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--force", common.force, "Evaluate outside the certified radius");
    sub->add_flag("--timing", common.timing, "Include wall time in the output");
    sub->add_option("--out", common.out, "Write the JSON result to this file");
  };
  auto add_order = [&](CLI::App* sub) {
    sub->add_option("--order", in.order, "Truncation order M")->check(CLI::NonNegativeNumber);
    sub->add_option("--epsilon", in.epsilon, "Target truncation error");
  };

  auto* obs = app.add_subcommand("observable", "Expectation value <A(t)>");
  obs->add_option("--ham", in.hams, "Hamiltonian JSON")->required();
  obs->add_option("--state", in.state, "Product state JSON")->required();
  obs->add_option("--obs", in.obs, "Observable JSON")->required();
  obs->add_option("--time", in.time, "Time t")->required();
  obs->add_option("--mode", in.mode, "short or continued");
  add_order(obs);
  add_common(obs);

  auto* los = app.add_subcommand("loschmidt", "Logarithm of the Loschmidt echo");
  los->add_option("--ham", in.hams, "Hamiltonian JSON")->required();
  los->add_option("--state", in.state, "Product state JSON")->required();
  los->add_option("--time", in.time, "Time t")->required();
  los->add_flag("--imaginary", in.imaginary, "Use the imaginary time i*t");
  add_order(los);
  add_common(los);

  auto* multi = app.add_subcommand("multi-loschmidt", "Multi-time echo tr(prod_l e^{-i H_l t_l} rho)");
  multi->add_option("--ham", in.hams, "Hamiltonian JSON, once per factor")->required();
  multi->add_option("--time", in.times, "Complex time per factor, e.g. 0.01 or 0.02i")->required();
  multi->add_option("--state", in.state, "Product state JSON")->required();
  add_order(multi);
  add_common(multi);

  auto* exact = app.add_subcommand("exact", "Dense reference values");
  exact->add_option("--what", in.what, "observable, loschmidt or distribution")->required();
  exact->add_option("--ham", in.hams, "Hamiltonian JSON (second one: measured Hamiltonian)")->required();
  exact->add_option("--state", in.state, "Product state JSON")->required();
  exact->add_option("--obs", in.obs, "Observable JSON");
  exact->add_option("--time", in.time, "Time t");
  exact->add_flag("--imaginary", in.imaginary, "Use the imaginary time i*t");
  add_common(exact);

  auto* conc = app.add_subcommand("concentration", "Energy concentration bound");
  conc->add_option("--variant", in.variant, "product or evolved");
  conc->add_option("--delta", in.delta, "Deviation delta")->required();
  conc->add_option("--time", in.time, "Evolution time (evolved variant)");
  conc->add_option("--ham", in.hams, "Hamiltonian JSON (evolution, then measured)")->required();
  add_common(conc);

  auto* qsl = app.add_subcommand("qsl", "Quantum speed limit lower bound");
  qsl->add_option("--ham", in.hams, "Hamiltonian JSON")->required();
  qsl->add_option("--state", in.state, "Pure product state JSON")->required();
  qsl->add_option("--time", in.time, "Time t")->required();
  add_common(qsl);

  auto* thr = app.add_subcommand("thresholds", "Degree and certified time windows");
  thr->add_option("--ham", in.hams, "Hamiltonian JSON")->required();
  add_common(thr);

  auto* dpt = app.add_subcommand("dpt-scan", "Per-site Loschmidt rate on a time grid");
  dpt->add_option("--ham", in.hams, "Hamiltonian JSON")->required();
  dpt->add_option("--state", in.state, "Product state JSON")->required();
  dpt->add_option("--order", in.order, "Truncation order M");
  dpt->add_option("--points", in.points, "Number of grid points");
  dpt->add_option("--fraction", in.fraction, "Largest time as a fraction of t*_L");
  add_common(dpt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, to_string(ErrorKind::Usage), e.what());
    return exit_code(ErrorKind::Usage);
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Json result;
    if (name == "observable") result = cmd_observable(in, common);
    else if (name == "loschmidt") result = cmd_loschmidt(in, common);
    else if (name == "multi-loschmidt") result = cmd_multi(in, common);
    else if (name == "exact") result = cmd_exact(in);
    else if (name == "concentration") result = cmd_concentration(in);
    else if (name == "qsl") result = cmd_qsl(in);
    else if (name == "thresholds") result = cmd_thresholds(in);
    else result = cmd_dpt_scan(in, common);

    Json doc;
    doc["schema"] = 1;
    doc["command"] = name;
    doc["result"] = std::move(result);
    if (common.timing)
      doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = doc.dump(2) + "\n";
    if (common.out.empty()) {
      out << text;
    } else {
      std::ofstream f(common.out);
      if (!f) fail(ErrorKind::Usage, "cannot write " + common.out);
      f << text;
    }
    return 0;
  } catch (const Error& e) {
    emit_error(err, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    emit_error(err, "InternalError", e.what());
    return 1;
  }
}

}  // namespace cexp::cli
