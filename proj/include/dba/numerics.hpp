#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dba/dirac.hpp"
#include "dba/parser.hpp"

namespace dba {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Array = std::vector<double>;

// Periodic grid on [0, length).
struct Grid {
  int n = 0;
  double length = 0;
  Array x;

  static Grid make(int n, double length);
  double dx() const { return length / n; }
};

// FFT-based differentiation and 2/3-rule filtering on a grid.
class Spectral {
 public:
  explicit Spectral(const Grid& g);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }
  Array derivative(const Array& f, int order, bool dealias = false) const;
  void dealias(Array& f) const;

  using Complex = std::complex<double>;
  std::vector<Complex> derivative(const std::vector<Complex>& f, int order) const;

 private:
  Grid grid_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

struct FieldState {
  std::map<std::string, Array> fields;
  double time = 0;
};

using JetTable = std::map<JetAtom, Array>;

// Pointwise evaluator of an expression over field jets.
class Evaluator {
 public:
  // Throws NumericError if e contains momenta or multipliers.
  Evaluator(const Expr& e, const Grid& g);

  const std::vector<JetAtom>& atoms() const { return atoms_; }

  // Jets must be present for every atom. With a filter, every product of
  // nonconstant factors is passed through the 2/3 rule.
  Array operator()(const JetTable& jets, const Spectral* dealias = nullptr) const;
  // Spatial jets computed spectrally from the state.
  Array operator()(const FieldState& s, const Spectral& sp) const;

 private:
  struct Node {
    Expr::Kind kind;
    double value = 0;
    int atom = -1;
    long exponent = 0;
    std::vector<int> children;
  };
  std::vector<Node> nodes_;
  std::vector<JetAtom> atoms_;
  int n_;
  int build(const Expr& e, std::map<JetAtom, int>& index);
};

Evaluator compile(const Expr& e, const Grid& g);

// Spatial jets of every atom in `atoms` from the state; time jets may be
// supplied through `extra`.
JetTable spectral_jets(const FieldState& s, const std::vector<JetAtom>& atoms, const Spectral& sp,
                       bool dealias = false);

// Jets of an amplitude/phase pair taken from u = a*exp(i*p), which stays
// accurate where a is tiny.
JetTable polar_jets(const Array& amplitude, const Array& phase, const std::string& a_name, const std::string& p_name,
                    int max_order, const Spectral& sp);

struct EquivalenceResult {
  double max_rel_error = 0;
  bool passed = false;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<std::pair<std::string, double>> per_equation;  // label -> max relative error
};

// Lagrangian equations, with time jets replaced by the Hamilton right sides,
// compared numerically against zero on seeded random band-limited fields:
// for each equation the time part A and the remainder B, both reduced on
// shell, must satisfy A = -B. A reference system, when given, is compared
// against the Hamilton right sides as well.
EquivalenceResult check_eom_equivalence(const LagrangianSpec& spec, const AnalysisReport& report, const Grid& g,
                                        std::uint64_t seed, double tol,
                                        const ReferenceSystem* reference = nullptr, int samples = 20);

// Variables actually evolved for a report. Fields fixed by base-order
// constraints are eliminated; a single field that enters its equation only
// through derivatives is evolved through u = -f_x.
class EvolutionSystem {
 public:
  static EvolutionSystem from_report(const AnalysisReport& r);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Expr>& rhs() const { return rhs_; }
  // Hamiltonian density (momenta eliminated) in the evolved variables.
  const Expr& hamiltonian() const { return h_; }
  bool polar() const { return polar_; }
  const std::optional<std::string>& potential_of() const { return potential_; }
  int max_order() const;

  // Rewrites an expression in report fields into the evolved variables.
  Expr translate(const Expr& e) const;

 private:
  std::vector<std::string> vars_;
  std::vector<Expr> rhs_;
  Expr h_;
  bool polar_ = false;
  std::optional<std::string> potential_;
  AnalysisReport report_;
};

struct EvolveOptions {
  double dt = 1e-4;
  double t_end = 1.0;
  // Default: on, except for amplitude/phase systems.
  std::optional<bool> dealias;
  std::vector<std::pair<std::string, Expr>> extra_monitors;  // in evolved variables
  std::ostream* csv = nullptr;
  int csv_every = 100;
};

struct MonitorSample {
  double t = 0;
  double mass = 0;
  double hamiltonian = 0;
  std::vector<double> extra;
};

struct EvolveResult {
  FieldState state;
  std::vector<MonitorSample> monitors;
  long steps = 0;
  double max_mass_drift = 0;         // relative, or absolute when the initial value is 0
  double max_hamiltonian_drift = 0;  // same convention
  std::vector<double> max_extra_drift;
};

// Classical RK4 method of lines. Aborts with NumericError on NaN, overflow
// or a vanishing amplitude in a polar system.
EvolveResult evolve(const EvolutionSystem& sys, const Grid& g, FieldState init, const EvolveOptions& opt);

// Right side of each evolved variable on a state.
std::vector<Array> evaluate_rhs(const EvolutionSystem& sys, const FieldState& s, const Spectral& sp, bool dealias);

// max |v_t - rhs_v| with denominators and negative powers cleared, over
// variables and grid, given v and v_t.
double residual(const EvolutionSystem& sys, const FieldState& s, const std::map<std::string, Array>& time_derivative,
                const Spectral& sp);

// sum(f) * dx
double integrate(const Array& f, const Grid& g);

// sech(x - c) summed over the nearest periodic images.
Array periodic_sech(const Grid& g, double center, int power = 1);

}  // namespace dba
