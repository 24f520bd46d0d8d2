#include "bshq_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bshq/action.hpp"
#include "bshq/eigensolver.hpp"
#include "bshq/error.hpp"
#include "bshq/identity_suite.hpp"
#include "bshq/model_file.hpp"
#include "bshq/models.hpp"
#include "bshq_cli/writer.hpp"

namespace bshq::cli {

namespace {

constexpr double kDefaultLevelTolerance = 1e-9;
constexpr double kIdentityTolerance = 1e-12;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string model;
  std::optional<double> hbar;
  std::string box;
  std::string format = "json";
  std::string out;
  std::optional<double> tol;
  std::string convention = "dirac";
  int n = 2;
  std::string offsets;
  std::string observable = "hamiltonian";
  std::optional<long> max_level;
};

std::vector<double> parse_offsets(const std::string &text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size())
        throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception &) {
      throw UsageError("--offsets: '" + item + "' is not a number");
    }
  }
  if (out.empty())
    throw UsageError("--offsets: expected a comma separated list");
  return out;
}

ModelDefinition load_model(const RunConfig &cfg) {
  const bool experimental = !cfg.offsets.empty();
  if (auto m = builtin_model(cfg.model, cfg.n, cfg.hbar.value_or(1.0),
                             experimental))
    return *m;
  std::filesystem::path path(cfg.model);
  if (std::filesystem::is_regular_file(path))
    return load_model_file(path);
  throw ModelError("unknown model '" + cfg.model +
                   "': expected ho1d, ho2d, so3, pendulum or a model file");
}

double resolve_hbar(const RunConfig &cfg, const ModelDefinition &m) {
  return cfg.hbar.value_or(m.default_hbar);
}

QuantizedModel quantize_model(const RunConfig &cfg, const ModelDefinition &m) {
  if (m.kind != ModelKind::Lattice)
    throw ModelError("model '" + m.name + "' is a potential model; use levels");
  double hbar = resolve_hbar(cfg, m);
  std::vector<double> offsets =
      cfg.offsets.empty() ? m.offsets : parse_offsets(cfg.offsets);
  if (offsets.empty())
    offsets.assign(m.dof, 0.0);
  if (offsets.size() != m.dof)
    throw UsageError("--offsets: expected " + std::to_string(m.dof) +
                     " values");
  Box box;
  if (!cfg.box.empty()) {
    box = parse_box(cfg.box);
    if (box.size() != m.dof)
      throw UsageError("--box: expected " + std::to_string(m.dof) +
                       " intervals for model '" + m.name + "'");
  }
  LadderConvention conv = parse_convention(cfg.convention);
  return QuantizedModel(m, LatticeConfig(hbar, offsets), box, conv,
                        cfg.tol.value_or(kDefaultLadderTolerance));
}

ojson envelope(const RunConfig &cfg, const ModelDefinition &m, double hbar) {
  ojson doc;
  doc["model"] = m.name;
  doc["hbar"] = hbar;
  doc["command"] = cfg.command;
  doc["results"] = ojson::array();
  doc["checks"] = ojson::array();
  return doc;
}

ojson quantum_numbers(const QuantumNumberVector &m) {
  ojson a = ojson::array();
  for (auto v : m)
    a.push_back(v);
  return a;
}

std::vector<std::string> m_cells(const QuantumNumberVector &m) {
  std::vector<std::string> cells;
  for (auto v : m)
    cells.push_back(std::to_string(v));
  return cells;
}

LatticeOperator resolve_observable(const QuantizedModel &qm,
                                   const std::string &name) {
  const auto &obs = qm.definition().observables;
  if (name == "hamiltonian" || obs.count(name))
    return qm.observable(name);
  Expression e;
  try {
    e = parse_expression(name);
  } catch (const ParseError &err) {
    throw ModelError("model '" + qm.definition().name +
                     "' has no observable '" + name +
                     "', and it does not parse as an expression (" +
                     err.what() + ")");
  }
  return qm.quantize(e);
}

std::string cmd_spectrum(const RunConfig &cfg) {
  ModelDefinition m = load_model(cfg);
  QuantizedModel qm = quantize_model(cfg, m);
  LatticeOperator op = resolve_observable(qm, cfg.observable);
  const auto &space = *qm.space();

  double asym = (op - adjoint(op)).max_abs();
  double bound = kIdentityTolerance * std::max(1.0, op.max_abs());
  if (asym > bound)
    throw ModelError("observable '" + cfg.observable +
                     "' is not Hermitian (max |O - O^+| = " +
                     format_csv_number(asym) + "); spectrum needs a real "
                     "observable");

  ojson doc = envelope(cfg, m, qm.hbar());
  std::string csv;
  if (op.is_diagonal()) {
    std::vector<std::string> header;
    for (std::size_t k = 0; k < space.dof(); ++k)
      header.push_back("m" + std::to_string(k + 1));
    header.push_back("value");
    csv += csv_row(header);
    for (std::size_t i = 0; i < space.dimension(); ++i) {
      double v = op.element(i, i).real();
      doc["results"].push_back(
          {{"m", quantum_numbers(space.states()[i])}, {"value", v}});
      auto row = m_cells(space.states()[i]);
      row.push_back(format_csv_number(v));
      csv += csv_row(row);
    }
  } else {
    std::vector<double> ev = eigenvalues_hermitian(op, bound);
    csv += csv_row({"index", "value"});
    for (std::size_t i = 0; i < ev.size(); ++i) {
      doc["results"].push_back({{"index", i}, {"value", ev[i]}});
      csv += csv_row({std::to_string(i), format_csv_number(ev[i])});
    }
  }
  doc["checks"].push_back({{"name", "hermitian"},
                           {"pass", true},
                           {"max_deviation", asym},
                           {"tolerance", bound}});
  return cfg.format == "csv" ? csv : write_json(doc);
}

std::string cmd_levels(const RunConfig &cfg, std::ostream &err) {
  ModelDefinition m = load_model(cfg);
  if (m.kind != ModelKind::Potential)
    throw ModelError("model '" + m.name +
                     "' is a lattice model; levels needs a potential model");
  double hbar = resolve_hbar(cfg, m);
  double tol = cfg.tol.value_or(kDefaultLevelTolerance);
  OneDofSystem sys = one_dof_system(m);
  LevelTable table = bs_energy_levels(sys, hbar, cfg.max_level, tol);

  ojson doc = envelope(cfg, m, hbar);
  std::string csv = csv_row({"m", "E", "A_residual"});
  double worst = 0.0;
  for (const auto &l : table.levels) {
    doc["results"].push_back(
        {{"m", l.m}, {"E", l.energy}, {"residual", l.residual}});
    csv += csv_row({std::to_string(l.m), format_csv_number(l.energy),
                    format_csv_number(l.residual)});
    worst = std::max(worst, l.residual);
  }
  doc["excluded"] = ojson::array();
  for (const auto &x : table.excluded) {
    doc["excluded"].push_back({{"m", x.m}, {"reason", x.reason}});
    if (cfg.format == "csv")
      err << "note: m = " << x.m << " excluded: " << x.reason << "\n";
  }
  doc["action_max"] = table.action_max;
  doc["checks"].push_back({{"name", "residuals"},
                           {"pass", worst <= tol},
                           {"max_deviation", worst},
                           {"tolerance", tol}});
  return cfg.format == "csv" ? csv : write_json(doc);
}

std::string cmd_verify(const RunConfig &cfg, std::ostream &err, bool &pass) {
  ModelDefinition m = load_model(cfg);
  QuantizedModel qm = quantize_model(cfg, m);
  IdentitySuiteOptions opts;
  opts.tol = kIdentityTolerance;
  opts.ladder_tol = cfg.tol.value_or(kDefaultLadderTolerance);
  IdentitySuiteResult suite = run_identity_suite(qm, opts);
  pass = suite.pass();

  ojson doc = envelope(cfg, m, qm.hbar());
  std::string csv = csv_row({"check", "pass", "max_deviation", "tolerance"});
  const double ladder_bound = opts.ladder_tol * qm.hbar() * qm.hbar();
  for (const auto &r : suite.ladders) {
    doc["results"].push_back({{"axis", r.axis + 1},
                              {"convention", std::string(to_string(r.convention))},
                              {"boundary_zeros", r.boundary_zeros},
                              {"positivity", r.positivity},
                              {"defect", r.defect},
                              {"residual", r.residual},
                              {"pass", r.pass}});
    std::string k = "[" + std::to_string(r.axis + 1) + "]";
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    csv += csv_row({"ladder_boundary_zeros" + k, flag(r.boundary_zeros), "", ""});
    csv += csv_row({"ladder_positivity" + k, flag(r.positivity), "", ""});
    csv += csv_row({"ladder_defect" + k, flag(r.defect <= ladder_bound),
                    format_csv_number(r.defect), format_csv_number(ladder_bound)});
    csv += csv_row({"ladder_residual" + k, flag(r.residual <= ladder_bound),
                    format_csv_number(r.residual),
                    format_csv_number(ladder_bound)});
    for (const auto &f : r.failures)
      err << "axis " << r.axis + 1 << ": " << f << "\n";
  }
  for (const auto &c : suite.checks) {
    ojson j = {{"name", c.name},
               {"pass", c.pass},
               {"max_deviation", c.max_deviation},
               {"tolerance", c.tolerance}};
    if (!c.detail.empty())
      j["detail"] = c.detail;
    doc["checks"].push_back(std::move(j));
    csv += csv_row({c.name, c.pass ? "true" : "false",
                    format_csv_number(c.max_deviation),
                    format_csv_number(c.tolerance)});
    if (!c.pass)
      err << "check failed: " << c.name << " (max deviation "
          << format_csv_number(c.max_deviation) << ")\n";
  }
  return cfg.format == "csv" ? csv : write_json(doc);
}

std::string cmd_export(const RunConfig &cfg) {
  if (cfg.format != "json")
    throw UsageError("export writes JSON only");
  ModelDefinition m = load_model(cfg);
  QuantizedModel qm = quantize_model(cfg, m);
  LatticeOperator op = resolve_observable(qm, cfg.observable);
  const auto &space = *qm.space();

  ojson doc;
  doc["dimension"] = space.dimension();
  doc["states"] = ojson::array();
  for (const auto &s : space.states())
    doc["states"].push_back(quantum_numbers(s));
  doc["bands"] = ojson::array();
  for (const auto &[offset, coeffs] : op.bands()) {
    ojson c = ojson::array();
    for (const auto &z : coeffs)
      c.push_back(ojson::array({z.real(), z.imag()}));
    doc["bands"].push_back(
        {{"offset", quantum_numbers(offset)}, {"coefficients", std::move(c)}});
  }
  return write_json(doc);
}

void emit(const RunConfig &cfg, const std::string &text, std::ostream &out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
  if (!f)
    throw UsageError("cannot open '" + cfg.out + "' for writing");
  f << text;
  if (!f)
    throw UsageError("failed writing '" + cfg.out + "'");
}

void add_common(CLI::App &sub, RunConfig &cfg, bool observable) {
  sub.add_option("--model", cfg.model, "Builtin model name or model file")
      ->required();
  sub.add_option("--hbar", cfg.hbar, "Action unit (default 1, or the model file's)")
      ->check(CLI::PositiveNumber);
  sub.add_option("--box", cfg.box, "Truncation box a:b[,a:b...]");
  sub.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--out", cfg.out, "Output path (default standard output)");
  sub.add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
  sub.add_option("--convention", cfg.convention, "Ladder convention")
      ->check(CLI::IsMember(
          {"dirac", "semiclassical-source", "semiclassical-midpoint"}));
  sub.add_option("--n", cfg.n, "so3: orbit radius r = (n/2) hbar")
      ->check(CLI::PositiveNumber);
  sub.add_option("--offsets", cfg.offsets,
                 "Experimental lattice offsets d1[,d2...]");
  if (observable)
    sub.add_option("--observable", cfg.observable,
                   "Observable name or expression (default hamiltonian)");
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Bohr-Sommerfeld-Heisenberg quantization engine", "bshq"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto *spectrum = app.add_subcommand("spectrum", "Spectrum of an observable");
  add_common(*spectrum, cfg, true);
  auto *levels =
      app.add_subcommand("levels", "Bohr-Sommerfeld levels of a potential model");
  add_common(*levels, cfg, false);
  levels->add_option("--max-level", cfg.max_level,
                     "Highest m to report (default: up to the first excluded)");
  auto *verify = app.add_subcommand("verify", "Operator identity suite");
  add_common(*verify, cfg, false);
  auto *exporter =
      app.add_subcommand("export", "Band form of a quantized observable");
  add_common(*exporter, cfg, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kCheckFailed;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    bool pass = true;
    std::string text;
    if (cfg.command == "spectrum")
      text = cmd_spectrum(cfg);
    else if (cfg.command == "levels")
      text = cmd_levels(cfg, err);
    else if (cfg.command == "verify")
      text = cmd_verify(cfg, err, pass);
    else
      text = cmd_export(cfg);
    emit(cfg, text, out);
    return pass ? kOk : kCheckFailed;
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const InconsistentQuantization &e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const ModelError &e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const EvaluationError &e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const NumericalError &e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return kNumericalError;
  }
}

} // namespace bshq::cli
