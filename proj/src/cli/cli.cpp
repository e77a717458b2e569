#include "dba/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dba/corpus.hpp"
#include "dba/numerics.hpp"
#include "dba/report.hpp"

namespace dba {

namespace {

struct Input {
  std::string name;
  std::string lagrangian;
  std::optional<std::string> eom;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Input load(const std::string& input) {
  if (const CorpusEntry* e = find_builtin(input)) return {e->name, e->lagrangian, e->eom};
  std::filesystem::path p(input);
  if (!std::filesystem::exists(p))
    throw std::runtime_error("'" + input + "' is neither a builtin system nor a readable file (see: dba examples)");
  Input in{input, read_file(p), std::nullopt};
  std::filesystem::path side = p;
  side.replace_extension(".eom");
  if (side != p && std::filesystem::exists(side)) in.eom = read_file(side);
  return in;
}

int exit_code(const AnalysisError& e) {
  switch (e.kind()) {
    case AnalysisError::Kind::NoClosure: return kExitNoClosure;
    case AnalysisError::Kind::Inconsistent: return kExitInconsistent;
    default: return kExitError;
  }
}

const char* error_label(const AnalysisError& e) {
  switch (e.kind()) {
    case AnalysisError::Kind::NoClosure: return "no closure";
    case AnalysisError::Kind::Inconsistent: return "inconsistent dynamics";
    case AnalysisError::Kind::Unsupported: return "unsupported";
    case AnalysisError::Kind::Undetermined: return "undetermined";
    case AnalysisError::Kind::Internal: return "internal error";
  }
  return "error";
}

// Parses and analyzes; on failure prints the diagnostic and returns the exit code.
std::optional<int> prepare(const RunConfig& cfg, std::ostream& err, Input& in, LagrangianSpec& spec,
                           AnalysisReport& report) {
  try {
    in = load(cfg.input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  try {
    spec = parse(in.lagrangian);
  } catch (const ParseError& e) {
    err << in.name << ":" << e.line() << ":" << e.column() << ": " << e.message() << "\n";
    return kExitError;
  }
  try {
    report = analyze(spec, cfg.max_iterations);
  } catch (const AnalysisError& e) {
    err << in.name << ": " << error_label(e) << ": " << e.what() << "\n";
    return exit_code(e);
  }
  return std::nullopt;
}

int do_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool color) {
  Input in;
  LagrangianSpec spec;
  AnalysisReport report;
  if (auto code = prepare(cfg, err, in, spec, report)) return *code;
  switch (cfg.format) {
    case Format::Plain: out << render_plain(report, color); break;
    case Format::Latex: out << render_latex(report); break;
    case Format::Json: out << report_to_json(report).dump(2) << "\n"; break;
  }
  return kExitOk;
}

int do_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool color) {
  Input in;
  LagrangianSpec spec;
  AnalysisReport report;
  if (auto code = prepare(cfg, err, in, spec, report)) return *code;
  try {
    std::optional<ReferenceSystem> ref;
    if (in.eom) ref = parse_reference(*in.eom);
    Grid g = Grid::make(cfg.grid_n, 2 * M_PI);
    EquivalenceResult r = check_eom_equivalence(spec, report, g, cfg.seed, cfg.tol, ref ? &*ref : nullptr);
    out << "seed: " << r.seed << "\n";
    out << "grid: " << cfg.grid_n << "\n";
    out << "samples: " << r.samples << "\n";
    for (const auto& [label, e] : r.per_equation) out << "  " << label << ": " << e << "\n";
    out << "max relative error: " << r.max_rel_error << " (tol " << cfg.tol << ")\n";
    const char* verdict = r.passed ? "PASS" : "FAIL";
    if (color)
      out << (r.passed ? "\x1b[32m" : "\x1b[31m") << verdict << "\x1b[0m\n";
    else
      out << verdict << "\n";
    return r.passed ? kExitOk : kExitError;
  } catch (const std::exception& e) {
    err << in.name << ": " << e.what() << "\n";
    return kExitError;
  }
}

int do_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Input in;
  LagrangianSpec spec;
  AnalysisReport report;
  if (auto code = prepare(cfg, err, in, spec, report)) return *code;
  try {
    EvolutionSystem sys = EvolutionSystem::from_report(report);
    const double length = 40.0;
    Grid g = Grid::make(cfg.grid_n, length);
    FieldState init;
    const double center = length / 2;
    if (sys.polar()) {
      init.fields[sys.variables()[0]] = periodic_sech(g, center);
      init.fields[sys.variables()[1]] = Array(static_cast<std::size_t>(g.n), 0.0);
    } else if (sys.potential_of()) {
      Array u = periodic_sech(g, center, 2);
      for (double& v : u) v *= -2;
      init.fields[sys.variables()[0]] = u;
    } else {
      throw NumericError("no default initial data for this system");
    }
    out << "# system: " << in.name << "\n";
    out << "# variables:";
    for (const auto& v : sys.variables()) out << " " << v;
    out << "\n# grid: " << cfg.grid_n << ", length: " << length << ", dt: " << cfg.dt << ", t_end: " << cfg.t_end
        << "\n# seed: " << cfg.seed << "\n";
    EvolveOptions opt;
    opt.dt = cfg.dt;
    opt.t_end = cfg.t_end;
    std::ostringstream csv;
    csv << std::setprecision(15);
    opt.csv = &csv;
    EvolveResult r = evolve(sys, g, init, opt);
    out << csv.str();
    out << "# steps: " << r.steps << "\n";
    if (sys.potential_of()) {
      const Array& u = r.state.fields.at(sys.variables()[0]);
      auto it = std::min_element(u.begin(), u.end());
      out << "# trough at x = " << g.x[static_cast<std::size_t>(it - u.begin())] << " (started at " << center
          << ")\n";
    }
    out << "# max relative mass drift: " << r.max_mass_drift << "\n";
    out << "# max relative hamiltonian drift: " << r.max_hamiltonian_drift << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << in.name << ": " << e.what() << "\n";
    return kExitError;
  }
}

int do_examples(std::ostream& out) {
  for (const auto& e : builtin_corpus()) {
    out << e.name << ": " << e.description << (e.eom ? " (with reference equations)" : "") << "\n";
    out << e.lagrangian;
  }
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool color) {
  switch (cfg.command) {
    case Command::Analyze: return do_analyze(cfg, out, err, color);
    case Command::Verify: return do_verify(cfg, out, err, color);
    case Command::Evolve: return do_evolve(cfg, out, err);
    case Command::Examples: return do_examples(out);
  }
  return kExitError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Dirac-Bergmann constraint analysis for 1+1-D Lagrangians"};
  app.require_subcommand(1);
  std::string format = "plain";
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"plain", "latex", "json"}));
  app.add_option("--grid", cfg.grid_n, "grid points (power of two)")
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            long n = std::strtol(s.c_str(), nullptr, 10);
            return n >= 16 && (n & (n - 1)) == 0 ? "" : "grid must be a power of two >= 16";
          },
          "POW2"));
  app.add_option("--dt", cfg.dt, "time step")->check(CLI::PositiveNumber);
  app.add_option("--t-end", cfg.t_end, "final time")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--tol", cfg.tol, "verification tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iterations", cfg.max_iterations, "consistency sweeps before giving up")
      ->check(CLI::PositiveNumber);

  auto* analyze_cmd = app.add_subcommand("analyze", "run the constraint algorithm and print the report");
  auto* verify_cmd = app.add_subcommand("verify", "check Hamilton equations against the Lagrangian numerically");
  auto* evolve_cmd = app.add_subcommand("evolve", "time-evolve and print monitor CSV");
  auto* examples_cmd = app.add_subcommand("examples", "list builtin systems");
  for (auto* c : {analyze_cmd, verify_cmd, evolve_cmd}) {
    c->add_option("input", cfg.input, "builtin name or .lag path")->required();
    c->fallthrough();
  }
  examples_cmd->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  if (analyze_cmd->parsed()) cfg.command = Command::Analyze;
  if (verify_cmd->parsed()) cfg.command = Command::Verify;
  if (evolve_cmd->parsed()) cfg.command = Command::Evolve;
  if (examples_cmd->parsed()) cfg.command = Command::Examples;
  cfg.format = format == "latex" ? Format::Latex : format == "json" ? Format::Json : Format::Plain;

  const char* env = std::getenv("DBA_COLOR");
  bool color = isatty(STDOUT_FILENO) && !(env && std::string(env) == "0");
  return run(cfg, out, err, color);
}

}  // namespace dba
