#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "kcontract/certificates.hpp"
#include "kcontract/dynamics.hpp"
#include "kcontract/matrix_io.hpp"
#include "kcontract/systems.hpp"

using namespace kcontract;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFail = 1, kInvalid = 2, kDimension = 3, kInconclusive = 4, kIntegration = 5 };

struct Options {
  std::vector<std::string> inputs;
  std::string output;
  std::string format = "csv";
  std::optional<int> k;
  std::string kind;
  std::string preset;
  std::optional<double> tol;
  std::optional<int> grid;
  std::optional<double> horizon;
};

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
}

// Writes to --output when given, otherwise to stdout.
void emit(const Options& o, const std::function<void(std::ostream&)>& body) {
  if (o.output.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw ParseError("cannot write " + o.output);
  body(out);
}

void emit_json(std::ostream& out, const nlohmann::json& j) {
  write_json(out, j);
  out << '\n';
}

const std::string& single_input(const Options& o) {
  if (o.inputs.size() != 1) throw ParseError("expected exactly one --input");
  return o.inputs.front();
}

int require_k(const Options& o) {
  if (!o.k) throw ParseError("--k is required");
  return *o.k;
}

CompoundKind compound_kind(const std::string& s) {
  if (s.empty() || s == "mult") return CompoundKind::Multiplicative;
  if (s == "add") return CompoundKind::Additive;
  throw ParseError("--kind must be mult or add");
}

int run_compound(const Options& o) {
  const Matrix m = read_matrix_file(single_input(o));
  const int k = require_k(o);
  const auto c = compound_kind(o.kind) == CompoundKind::Multiplicative ? mult_compound(m, k) : add_compound(m, k);
  emit(o, [&](std::ostream& out) {
    if (o.format == "json") {
      write_matrix_json(out, c.data);
    } else {
      write_matrix_csv(out, c.data);
    }
  });
  return kOk;
}

int run_measure(const Options& o) {
  const Matrix m = read_matrix_file(single_input(o));
  const int k = o.k.value_or(1);
  std::vector<Norm> norms;
  if (o.kind.empty() || o.kind == "all") {
    norms = {Norm::L1, Norm::L2, Norm::Linf};
  } else {
    norms = {parse_norm(o.kind)};
  }
  std::vector<std::pair<Norm, double>> values;
  for (Norm n : norms) values.emplace_back(n, compound_measure(m, k, n));
  emit(o, [&](std::ostream& out) {
    if (o.format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& [n, v] : values) j.push_back({{"kind", to_string(n)}, {"k", k}, {"value", v}});
      emit_json(out, j);
    } else {
      out << "kind,k,value\n";
      for (const auto& [n, v] : values) out << to_string(n) << "," << k << "," << format_double(v) << "\n";
    }
  });
  return kOk;
}

int run_decompose(const Options& o) {
  if (o.inputs.size() != 2) throw ParseError("decompose needs --input A --input B");
  const Matrix a = read_matrix_file(o.inputs[0]);
  const Matrix b = read_matrix_file(o.inputs[1]);
  const int k = require_k(o);
  const bool mult = compound_kind(o.kind) == CompoundKind::Multiplicative;
  const auto dec = mult ? block_diag_mult_decompose(a, b, k) : block_diag_add_decompose(a, b, k);
  const Matrix direct = mult ? mult_compound(block_diag(a, b), k).data : add_compound(block_diag(a, b), k).data;
  const double err = (dec.reconstruct() - direct).cwiseAbs().maxCoeff();
  emit(o, [&](std::ostream& out) {
    if (o.format == "json") {
      nlohmann::json j;
      j["k"] = k;
      j["kind"] = mult ? "mult" : "add";
      j["permutation"] = dec.permutation.mapping;
      nlohmann::json blocks = nlohmann::json::array();
      for (const auto& bl : dec.blocks) {
        blocks.push_back({{"i", bl.tail_order}, {"matrix", matrix_to_json(bl.block)}});
      }
      j["blocks"] = blocks;
      j["reconstruction_error"] = err;
      emit_json(out, j);
    } else {
      write_matrix_csv(out, dec.assemble());
    }
  });
  return kOk;
}

int run_volume(const Options& o) {
  const Parallelotope p{read_matrix_file(single_input(o))};
  const double v = parallelotope_volume(p);
  const double g = gram_volume(p);
  emit(o, [&](std::ostream& out) {
    if (o.format == "json") {
      emit_json(out, {{"k", p.generators.cols()}, {"volume", v}, {"gram_volume", g}});
    } else {
      out << "k,volume,gram_volume\n"
          << p.generators.cols() << "," << format_double(v) << "," << format_double(g) << "\n";
    }
  });
  return kOk;
}

// ---- certify ----

MeasureKind kind_from_json(const nlohmann::json& j) {
  if (j.is_string()) return MeasureKind(parse_norm(j.get<std::string>()));
  if (j.is_object() && j.contains("norm") && j["norm"].is_string()) {
    MeasureKind kind(parse_norm(j["norm"].get<std::string>()));
    if (j.contains("scaling")) kind.scaling = matrix_param(j["scaling"], "scaling");
    return kind;
  }
  throw ParseError("kind must be a norm name or {norm, scaling}");
}

std::vector<MeasureKind> kinds_from_json(const nlohmann::json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "auto")) return {};
  if (j.is_array()) {
    std::vector<MeasureKind> out;
    for (const auto& e : j) out.push_back(kind_from_json(e));
    return out;
  }
  return {kind_from_json(j)};
}

Vector vector_param(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(what + " must be numeric");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

double number_param(const nlohmann::json& cfg, const char* key) {
  if (!cfg.contains(key) || !cfg[key].is_number()) throw ParseError(std::string("config needs numeric ") + key);
  return cfg[key].get<double>();
}

const std::set<std::string> kCertifyKeys = {"system", "params", "certificate", "k", "kind", "method",
                                            "grid",   "midpoints", "times", "box", "entry_bounds", "split",
                                            "c",      "alpha", "g_bound"};

int run_certify(const Options& o) {
  const nlohmann::json cfg = load_json(single_input(o));
  if (!cfg.is_object()) throw ParseError("certify config must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (!kCertifyKeys.count(it.key())) throw ParseError("unknown config key '" + it.key() + "'");
  }
  if (!cfg.contains("system") || !cfg["system"].is_string()) throw ParseError("config needs a system name");
  const std::string name = cfg["system"].get<std::string>();
  const nlohmann::json params = cfg.value("params", nlohmann::json::object());
  SystemModel sys = make_builtin(name, params);
  if (cfg.contains("box")) {
    const auto& b = cfg["box"];
    if (!b.is_object() || !b.contains("lower") || !b.contains("upper")) throw ParseError("box needs lower and upper");
    sys.box = Box{vector_param(b["lower"], "box.lower"), vector_param(b["upper"], "box.upper")};
    sys.box->validate();
  }
  if (cfg.contains("entry_bounds")) {
    const auto& e = cfg["entry_bounds"];
    if (!e.is_object() || !e.contains("lo") || !e.contains("hi")) throw ParseError("entry_bounds needs lo and hi");
    sys.entry_bounds = EntryBounds{matrix_param(e["lo"], "entry_bounds.lo"), matrix_param(e["hi"], "entry_bounds.hi")};
    sys.entry_bounds->validate();
    sys.envelope.reset();
  }

  int k = 0;
  if (o.k) {
    k = *o.k;
  } else if (cfg.contains("k") && cfg["k"].is_number_integer()) {
    k = cfg["k"].get<int>();
  } else {
    throw ParseError("config needs integer k");
  }

  std::vector<MeasureKind> kinds = o.kind.empty() ? kinds_from_json(cfg.value("kind", nlohmann::json()))
                                                  : kinds_from_json(nlohmann::json(o.kind));

  const std::string method_name = o.grid ? "grid" : cfg.value("method", std::string("analytic"));
  DomainMethod method = AnalyticBounds{};
  if (method_name == "grid") {
    GridSampling g;
    if (o.grid) {
      g.points_per_dim = *o.grid;
    } else if (cfg.contains("grid")) {
      if (!cfg["grid"].is_number_integer()) throw ParseError("grid must be an integer");
      g.points_per_dim = cfg["grid"].get<int>();
    }
    if (g.points_per_dim < 1) throw ParseError("grid needs at least one point per dimension");
    g.refine_midpoints = cfg.value("midpoints", true);
    if (cfg.contains("times")) {
      const Vector t = vector_param(cfg["times"], "times");
      g.times.assign(t.data(), t.data() + t.size());
    }
    method = g;
  } else if (method_name != "analytic") {
    throw ParseError("method must be analytic or grid");
  }

  const std::string cert = cfg.value("certificate", std::string("single"));
  CertificateReport report;
  if (cert == "single") {
    if (kinds.size() > 1) throw ParseError("single certificate takes one kind");
    report = certify_k_contraction(sys, k, kinds.empty() ? std::nullopt : std::optional<MeasureKind>(kinds[0]), method);
  } else if (cert == "series") {
    int split = builtin_split(name, params);
    if (cfg.contains("split")) {
      if (!cfg["split"].is_number_integer()) throw ParseError("split must be an integer");
      split = cfg["split"].get<int>();
    }
    if (split <= 0) throw ParseError("series certificate needs split (dimension of the driving sub-system)");
    report = certify_series(SeriesModel{sys, split}, k, kinds, method);
  } else if (cert == "skew") {
    int split = builtin_split(name, params);
    if (cfg.contains("split")) split = cfg["split"].get<int>();
    if (split <= 0) throw ParseError("skew certificate needs split");
    report = certify_skew_feedback(SkewPair{sys, split}, k, number_param(cfg, "c"), method);
  } else if (cert == "exp_input") {
    report = certify_exp_input(sys, number_param(cfg, "g_bound"), number_param(cfg, "alpha"), k, kinds, method);
  } else {
    throw ParseError("certificate must be single, series, skew or exp_input");
  }

  const nlohmann::json j = to_json(report);
  if (!o.output.empty()) emit(o, [&](std::ostream& out) { emit_json(out, j); });
  if (o.format == "json") {
    emit_json(std::cout, j);
  } else {
    std::cout << to_text(report);
  }
  return exit_code(report.verdict);
}

// ---- simulate ----

struct SimConfig {
  std::string system;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Vector> initial;
  double horizon = 100.0;
  std::size_t samples = 10001;
  double tol = 1e-6;
  IntegrationOptions integ;
  std::optional<Matrix> generators;  // volume mode
};

SimConfig preset(const std::string& name) {
  SimConfig c;
  if (name == "fig2") {
    c.system = "thomas";
    c.initial = thomas_initial_conditions();
  } else if (name == "fig3") {
    c.system = "thomas_perturbed";
    for (const auto& x : thomas_initial_conditions()) {
      Vector z(4);
      z << x, 1.0;
      c.initial.push_back(z);
    }
  } else if (name == "growth") {
    c.system = "lti_series";
    c.params = {{"zeta1", -0.5}, {"zeta2", -1.0}};
    c.initial = {Vector::Zero(4)};
    c.horizon = 20.0;
    c.samples = 201;
    Matrix g = Matrix::Zero(4, 2);
    g(0, 0) = 1.0;
    g(2, 1) = 1.0;
    c.generators = g;
  } else {
    throw ParseError("unknown preset '" + name + "' (fig2, fig3, growth)");
  }
  return c;
}

SimConfig sim_config_from_json(const nlohmann::json& cfg) {
  static const std::set<std::string> keys = {"system", "params", "initial_conditions", "horizon", "samples",
                                             "tol", "rtol", "atol", "generators"};
  if (!cfg.is_object()) throw ParseError("simulate config must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (!keys.count(it.key())) throw ParseError("unknown config key '" + it.key() + "'");
  }
  SimConfig c;
  if (!cfg.contains("system") || !cfg["system"].is_string()) throw ParseError("config needs a system name");
  c.system = cfg["system"].get<std::string>();
  c.params = cfg.value("params", nlohmann::json::object());
  if (!cfg.contains("initial_conditions")) throw ParseError("config needs initial_conditions");
  const auto& ic = cfg["initial_conditions"];
  if (ic.is_string() && ic.get<std::string>() == "thomas_fixture") {
    c.initial = thomas_initial_conditions();
  } else if (ic.is_array()) {
    for (const auto& x : ic) c.initial.push_back(vector_param(x, "initial condition"));
  } else {
    throw ParseError("initial_conditions must be an array or \"thomas_fixture\"");
  }
  if (cfg.contains("horizon")) c.horizon = number_param(cfg, "horizon");
  if (cfg.contains("samples")) {
    if (!cfg["samples"].is_number_integer() || cfg["samples"].get<long long>() < 2) {
      throw ParseError("samples must be an integer >= 2");
    }
    c.samples = cfg["samples"].get<std::size_t>();
  }
  if (cfg.contains("tol")) c.tol = number_param(cfg, "tol");
  if (cfg.contains("rtol")) c.integ.rtol = number_param(cfg, "rtol");
  if (cfg.contains("atol")) c.integ.atol = number_param(cfg, "atol");
  if (cfg.contains("generators")) c.generators = matrix_param(cfg["generators"], "generators");
  return c;
}

std::string trajectory_file(std::size_t i) {
  std::ostringstream os;
  os << "trajectory_" << std::setw(2) << std::setfill('0') << i + 1 << ".csv";
  return os.str();
}

int run_simulate(const Options& o) {
  SimConfig c;
  if (!o.preset.empty()) {
    if (!o.inputs.empty()) throw ParseError("use either --preset or --input");
    c = preset(o.preset);
  } else {
    c = sim_config_from_json(load_json(single_input(o)));
  }
  if (o.horizon) c.horizon = *o.horizon;
  if (o.tol) c.tol = *o.tol;
  if (!(c.horizon > 0.0) || !(c.tol > 0.0)) throw ParseError("horizon and tol must be positive");

  const SystemModel sys = make_builtin(c.system, c.params);
  for (auto& x : c.initial) {
    // 3D fixture points for the augmented system start at y = 1.
    if (c.system == "thomas_perturbed" && x.size() == 3) {
      Vector z(4);
      z << x, 1.0;
      x = z;
    }
    if (x.size() != sys.dim) throw ParseError("initial condition has wrong dimension");
  }
  if (c.initial.empty()) throw ParseError("no initial conditions");

  const fs::path dir = o.output.empty() ? fs::path(".") : fs::path(o.output);
  fs::create_directories(dir);
  const auto times = linspace(0.0, c.horizon, c.samples);

  nlohmann::json summary;
  summary["system"] = c.system;
  summary["params"] = c.params;
  summary["horizon"] = c.horizon;
  summary["samples"] = c.samples;
  summary["tol"] = c.tol;

  auto write_csv = [&](const std::string& file, const TrajectoryRecord& rec) {
    std::ofstream out(dir / file);
    if (!out) throw ParseError("cannot write " + (dir / file).string());
    write_trajectory_csv(out, rec);
  };
  auto write_summary = [&]() {
    std::ofstream out(dir / "summary.json");
    emit_json(out, summary);
  };

  if (c.generators) {
    const Parallelotope p{*c.generators};
    TrajectoryRecord rec;
    try {
      rec = volume_trajectory(sys, c.initial.front(), p, times, c.integ);
    } catch (const IntegrationError& e) {
      summary["error"] = e.what();
      write_summary();
      throw;
    }
    write_csv("volume.csv", rec);
    const RateFit fit = fit_log_rate(rec.times, rec.volumes);
    summary["volume_file"] = "volume.csv";
    summary["k"] = p.generators.cols();
    summary["fitted_rate"] = fit.rate;
    summary["fit_residual"] = fit.residual;
    summary["fit_points"] = fit.points_used;
    summary["truncated"] = fit.truncated;
    write_summary();
    std::cout << std::setprecision(6) << "volume growth: fitted rate " << fit.rate << " (residual " << fit.residual
              << ", " << fit.points_used << " points)\n";
    return kOk;
  }

  std::vector<TrajectoryRecord> records;
  nlohmann::json trajs = nlohmann::json::array();
  int status = kOk;
  for (std::size_t i = 0; i < c.initial.size(); ++i) {
    try {
      records.push_back(integrate(sys, c.initial[i], times, c.integ));
    } catch (const IntegrationError& e) {
      std::cerr << "trajectory " << i + 1 << ": " << e.what() << "\n";
      trajs.push_back({{"index", i + 1}, {"error", e.what()}});
      status = kIntegration;
      continue;
    }
    write_csv(trajectory_file(i), records.back());
  }
  const auto conv = detect_equilibrium_convergence(records, sys.field, c.tol);
  std::size_t r = 0;
  for (std::size_t i = 0; i < c.initial.size(); ++i) {
    if (r >= records.size() || trajs.size() > i) continue;
    const auto& rec = records[r];
    const auto& res = conv.results[r];
    nlohmann::json t = {{"index", i + 1},
                        {"file", trajectory_file(i)},
                        {"initial_state", std::vector<double>(c.initial[i].data(), c.initial[i].data() + c.initial[i].size())},
                        {"final_state", std::vector<double>(rec.states.back().data(), rec.states.back().data() + rec.states.back().size())},
                        {"converged", res.converged},
                        {"field_norm", res.field_norm},
                        {"last_change", res.last_change},
                        {"cluster", res.cluster}};
    if (sys.invariant_box) {
      t["entered_invariant_box"] = first_entry_index(rec, *sys.invariant_box) >= 0;
      t["stays_inside_after_entry"] = stays_inside_after_entry(rec, *sys.invariant_box);
    }
    trajs.push_back(t);
    ++r;
  }
  summary["trajectories"] = trajs;
  summary["converged_count"] = conv.converged_count();
  nlohmann::json eq = nlohmann::json::array();
  for (const auto& e : conv.equilibria) eq.push_back(std::vector<double>(e.data(), e.data() + e.size()));
  summary["equilibria"] = eq;
  std::string cls = "partially converged";
  if (!records.empty() && conv.all_converged()) cls = "all converged";
  if (conv.none_converged()) cls = "none converged";
  summary["classification"] = cls;
  write_summary();

  std::cout << c.system << ": " << cls << " (" << conv.converged_count() << "/" << records.size() << "), "
            << conv.equilibria.size() << " equilibrium cluster(s)\n";
  std::cout << std::setprecision(6);
  for (std::size_t i = 0; i < conv.results.size(); ++i) {
    std::cout << "  trajectory " << i + 1 << ": |f| = " << conv.results[i].field_norm
              << (conv.results[i].converged ? "  converged" : "") << "\n";
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound matrices, matrix measures and k-contraction certificates"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", o.inputs, "Input file (matrix CSV/JSON or config JSON)");
    sub->add_option("--output", o.output, "Output file (directory for simulate)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* compound = app.add_subcommand("compound", "Multiplicative or additive compound of a matrix");
  add_common(compound);
  compound->add_option("--k", o.k, "Compound order");
  compound->add_option("--kind", o.kind, "mult or add");

  auto* measure = app.add_subcommand("measure", "Matrix measure of the additive compound");
  add_common(measure);
  measure->add_option("--k", o.k, "Compound order (default 1)");
  measure->add_option("--kind", o.kind, "L1, L2, Linf or all");

  auto* decompose = app.add_subcommand("decompose", "Block decomposition of compounds of diag(A, B)");
  add_common(decompose);
  decompose->add_option("--k", o.k, "Compound order");
  decompose->add_option("--kind", o.kind, "mult or add");

  auto* certify = app.add_subcommand("certify", "Check a k-contraction certificate from a JSON config");
  add_common(certify);
  certify->add_option("--k", o.k, "Override k");
  certify->add_option("--kind", o.kind, "Override the measure kind (L1, L2, Linf, auto)");
  certify->add_option("--grid", o.grid, "Use grid sampling with this many points per dimension");

  auto* simulate = app.add_subcommand("simulate", "Integrate trajectories and classify convergence");
  add_common(simulate);
  simulate->add_option("--preset", o.preset, "fig2, fig3 or growth");
  simulate->add_option("--tol", o.tol, "Equilibrium tolerance");
  simulate->add_option("--horizon", o.horizon, "Final time");

  auto* volume = app.add_subcommand("volume", "Volume of the parallelotope spanned by matrix columns");
  add_common(volume);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*compound) return run_compound(o);
    if (*measure) return run_measure(o);
    if (*decompose) return run_decompose(o);
    if (*certify) return run_certify(o);
    if (*simulate) return run_simulate(o);
    if (*volume) return run_volume(o);
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDimension;
  } catch (const IntegrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIntegration;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
