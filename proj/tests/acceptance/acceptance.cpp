// Acceptance criteria. One PASS/FAIL line per criterion.
//
//   bshq_acceptance            run everything
//   bshq_acceptance 3 7b       run the named criteria
//
// Exit status is 0 iff every criterion that ran passed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>

#include "bshq/action.hpp"
#include "bshq/eigensolver.hpp"
#include "bshq/error.hpp"
#include "bshq/identity_suite.hpp"
#include "bshq/models.hpp"
#include "bshq_cli/cli.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace bshq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Record a sub-check; the first failure is kept in detail.
  void require(bool ok, const std::string &what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

StateSpacePtr orbit_space(double r, double hbar, std::int64_t lim) {
  RealBindings k{{"hbar", hbar}, {"r", r}};
  return enumerate_states(
      LatticeRegion::parse(1, {"A1 >= -r", "A1 <= r"}, k), {{-lim, lim}},
      LatticeConfig(hbar, 1));
}

RadialProfile orbit_profile(double r) {
  return RadialProfile(
      0, bind_constants(parse_expression("r^2 - A1^2"), {{"r", r}}), 1);
}

int run_cli(const std::vector<std::string> &args, std::string *out = nullptr) {
  std::ostringstream o, e;
  int code = cli::run(args, o, e);
  if (out)
    *out = o.str();
  return code;
}

// 1. ho1d spectrum, hbar = 1, box 0..100, exact.
Outcome c1() {
  Outcome r;
  QuantizedModel q(model_ho1d(), LatticeConfig(1.0, 1), {{0, 100}});
  LatticeOperator h = q.observable("H");
  std::vector<double> ev = eigenvalues_hermitian(h);
  r.require(ev.size() == 101, "dimension " + std::to_string(ev.size()));
  for (std::size_t m = 0; m < ev.size(); ++m)
    r.require(ev[m] == static_cast<double>(m) &&
                  h.element(m, m) == complex(static_cast<double>(m)),
              "eigenvalue " + std::to_string(m) + " is " + g(ev[m]));
  if (r.pass)
    r.detail = "{0, ..., 100} exactly";
  return r;
}

// 2. Dirac beta = 2 m hbar for m <= 200; semiclassical source agrees.
Outcome c2() {
  Outcome r;
  double worst = 0.0, worst_sc = 0.0;
  for (double hbar : {1.0, 0.1}) {
    QuantizedModel d(model_ho1d(hbar), LatticeConfig(hbar, 1), {{0, 200}});
    QuantizedModel s(model_ho1d(hbar), LatticeConfig(hbar, 1), {{0, 200}},
                     LadderConvention::SemiclassicalSource);
    const auto &cd = d.coefficients(0), &cs = s.coefficients(0);
    for (std::size_t m = 0; m <= 200; ++m) {
      worst = std::max(worst, std::abs(cd.beta[m] - 2.0 * m * hbar));
      worst_sc = std::max(worst_sc, std::abs(cd.b[m] - cs.b[m]));
    }
  }
  r.require(worst <= 1e-12, "max |beta - 2 m hbar| = " + g(worst));
  r.require(worst_sc <= 1e-12, "max |b_dirac - b_source| = " + g(worst_sc));
  if (r.pass)
    r.detail = "max |beta - 2 m hbar| = " + g(worst) +
               ", max |b_dirac - b_source| = " + g(worst_sc);
  return r;
}

// 3. SO(3), n = 4, hbar = 1.
Outcome c3() {
  Outcome r;
  QuantizedModel q(model_so3(4), LatticeConfig(1.0, 1), {});
  const auto &space = *q.space();
  r.require(space.dimension() == 5,
            "dimension " + std::to_string(space.dimension()));
  const double j = 2.0;
  const auto &c = q.coefficients(0);
  double beta_err = 0.0;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    double m = static_cast<double>(space.states()[i][0]);
    beta_err = std::max(beta_err, std::abs(c.beta[i] - (j + m) * (j - m + 1)));
  }
  r.require(beta_err <= 1e-12, "beta error " + g(beta_err));
  r.require(c.residual <= 1e-12, "residual " + g(c.residual));

  LatticeOperator j1 = q.observable("J1"), j2 = q.observable("J2"),
                  j3 = q.observable("J3");
  double cas = (j1 * j1 + j2 * j2 + j3 * j3 -
                complex(6.0) * identity(q.space()))
                   .max_abs();
  r.require(cas <= 1e-12, "Casimir error " + g(cas));
  auto ev = eigenvalues_hermitian(j1);
  double ev_err = 0.0;
  for (int i = 0; i < 5; ++i)
    ev_err = std::max(ev_err, std::abs(ev[i] - (i - 2.0)));
  r.require(ev_err <= 1e-10, "J1 eigenvalue error " + g(ev_err));
  double closure = (commutator(j1, j2) - complex(0.0, -1.0) * j3).max_abs();
  r.require(closure <= 1e-12, "[J1, J2] + i J3 = " + g(closure));
  if (r.pass)
    r.detail = "beta err " + g(beta_err) + ", residual " + g(c.residual) +
               ", Casimir err " + g(cas) + ", J1 spectrum err " + g(ev_err) +
               ", closure err " + g(closure);
  return r;
}

// 4. Quantizability: r = 2 hbar consistent, r = 2.3 hbar raises.
Outcome c4() {
  Outcome r;
  std::string detail;
  for (double hbar : {1.0, 0.5}) {
    auto good = orbit_space(2.0 * hbar, hbar, 3);
    double res = solve_dirac_recursion(orbit_profile(2.0 * hbar), *good).residual;
    r.require(res <= 1e-12, "r = 2 hbar residual " + g(res));

    auto bad = orbit_space(2.3 * hbar, hbar, 3);
    try {
      solve_dirac_recursion(orbit_profile(2.3 * hbar), *bad);
      r.require(false, "r = 2.3 hbar did not raise");
    } catch (const InconsistentQuantization &e) {
      r.require(e.residual() > 0.1 * hbar * hbar,
                "r = 2.3 hbar residual " + g(e.residual()));
      if (hbar == 1.0)
        detail = "r = 2 hbar: residual " + g(res) +
                 "; r = 2.3 hbar: raised, residual " + g(e.residual());
    }
  }
  if (r.pass)
    r.detail = detail;
  return r;
}

// 5. ho2d degeneracy and commuting ladders.
Outcome c5() {
  Outcome r;
  QuantizedModel q(model_ho2d(), LatticeConfig(1.0, 2), {{0, 20}, {0, 20}});
  LatticeOperator h = q.observable("H");
  std::vector<double> ev = eigenvalues_hermitian(h);
  std::map<long, int> count;
  for (double e : ev)
    ++count[std::lround(e)];
  for (long l = 0; l <= 20; ++l)
    r.require(count[l] == l + 1, "multiplicity of " + std::to_string(l) +
                                     " is " + std::to_string(count[l]));
  double comm = commutator(q.chi(0), q.chi(1)).max_abs();
  r.require(comm == 0.0, "[chi1, chi2] = " + g(comm));
  if (r.pass)
    r.detail = "multiplicity l+1 for l <= 20; [chi1, chi2] = 0 exactly";
  return r;
}

// 6. Pendulum action against the elliptic closed form (Boost as oracle).
Outcome c6() {
  Outcome r;
  OneDofSystem sys = pendulum_system();
  double worst = 0.0;
  for (double E : {0.2, 0.5, 1.0, 1.5, 1.9}) {
    double k = std::sqrt(E / 2.0);
    double closed = 8.0 / std::numbers::pi *
                    (boost::math::ellint_2(k) -
                     (1.0 - k * k) * boost::math::ellint_1(k));
    double err = std::abs(action_integral(sys, E) - closed);
    worst = std::max(worst, err);
    r.require(err <= 1e-10, "E = " + g(E) + ": error " + g(err));
  }
  if (r.pass)
    r.detail = "max error " + g(worst);
  return r;
}

// 7a. hbar = 0.1: m = 0..25, residuals <= 1e-9.
Outcome c7a() {
  Outcome r;
  LevelTable t = bs_energy_levels(pendulum_system(), 0.1);
  r.require(t.levels.size() == 26,
            std::to_string(t.levels.size()) + " levels");
  double worst = 0.0;
  for (std::size_t i = 0; i < t.levels.size(); ++i) {
    r.require(t.levels[i].m == static_cast<long>(i), "level numbering");
    worst = std::max(worst, t.levels[i].residual);
  }
  r.require(worst <= 1e-9, "max residual " + g(worst));
  r.require(!t.excluded.empty() && t.excluded[0].m == 26,
            "m = 26 not reported as excluded");
  if (r.pass)
    r.detail = "m = 0..25, max residual " + g(worst) + ", A(2-) = " +
               g(t.action_max);
  return r;
}

// 7b. hbar = 0.01, m = 1: E_1 / hbar in [1.0, 1.01].
Outcome c7b() {
  Outcome r;
  const double hbar = 0.01;
  LevelTable t = bs_energy_levels(pendulum_system(), hbar, 1);
  double ratio = t.levels.at(1).energy / hbar;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "E_1/hbar = %.9f (A(E) = E + E^2/16 + ... gives 1 - hbar/16 = "
                "%.9f)",
                ratio, 1.0 - hbar / 16.0);
  r.pass = ratio >= 1.0 && ratio <= 1.01;
  r.detail = buf;
  return r;
}

// 8. Identity suite on every builtin lattice model; verify exits 0.
Outcome c8() {
  Outcome r;
  struct Case {
    std::string name;
    ModelDefinition model;
    std::vector<std::string> args;
  };
  std::vector<Case> cases = {
      {"ho1d", model_ho1d(), {"verify", "--model", "ho1d"}},
      {"ho2d", model_ho2d(), {"verify", "--model", "ho2d"}},
      {"so3 n=2", model_so3(2), {"verify", "--model", "so3", "--n", "2"}},
      {"so3 n=4", model_so3(4), {"verify", "--model", "so3", "--n", "4"}},
  };
  int checks = 0;
  for (const auto &c : cases) {
    QuantizedModel q(c.model, LatticeConfig(1.0, c.model.dof), {});
    IdentitySuiteResult s = run_identity_suite(q);
    for (const auto &k : s.checks) {
      ++checks;
      r.require(k.pass, c.name + ": " + k.name + " deviation " +
                            g(k.max_deviation));
    }
    for (const auto &l : s.ladders)
      r.require(l.pass, c.name + ": ladder consistency failed");
    int code = run_cli(c.args);
    r.require(code == 0, c.name + ": verify exit " + std::to_string(code));
  }
  if (r.pass)
    r.detail = std::to_string(checks) + " identity checks over 4 models; "
               "verify exit 0";
  return r;
}

// 9. Parser round trip, derivatives vs finite differences, positioned errors.
Outcome c9() {
  Outcome r;
  for (const auto &text : expression_corpus()) {
    Expression e = parse_expression(text);
    r.require(structurally_equal(e, parse_expression(render(e))),
              "round trip of '" + text + "'");
  }

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> xs(0.2, 1.8), cs(-2.0, 2.0);
  const char *shapes[] = {"a*x^3 + b*x", "sin(a*x)*exp(b*x)",
                          "sqrt(x^2 + a^2)/(b^2 + 1)", "cos(x)^2 - a/x",
                          "(a*x^2 + b^2 + 1)^-2", "exp(-a*x^2)*x"};
  double worst = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    Expression f = bind_constants(parse_expression(shapes[trial % 6]),
                                  {{"a", cs(rng)}, {"b", cs(rng)}});
    Expression df = differentiate(f, "x");
    double x = xs(rng);
    auto fx = [&](double t) { return eval_real(f, {{"x", t}}); };
    double exact = eval_real(df, {{"x", x}});
    double err = std::abs(exact - oracle::central_difference(fx, x, 1e-3)) /
                 std::max(1.0, std::abs(exact));
    worst = std::max(worst, err);
  }
  r.require(worst <= 1e-6, "derivative error " + g(worst));

  const std::vector<std::pair<std::string, std::size_t>> malformed = {
      {"2*", 3}, {"(A1 + 2", 8}, {"A1 + * 3", 6}, {"sqrt(", 6}};
  for (const auto &[text, pos] : malformed) {
    try {
      parse_expression(text);
      r.require(false, "'" + text + "' parsed");
    } catch (const ParseError &e) {
      r.require(e.position() == pos, "'" + text + "' error at " +
                                         std::to_string(e.position()));
    }
  }
  if (r.pass)
    r.detail = std::to_string(expression_corpus().size()) +
               " round trips, max relative derivative error " + g(worst) +
               ", positioned syntax errors";
  return r;
}

// 10. Golden commands are byte-stable.
Outcome c10() {
  Outcome r;
  const std::filesystem::path golden = BSHQ_SOURCE_DIR "/tests/golden";
  const std::vector<std::pair<std::vector<std::string>, std::string>> cmds = {
      {{"spectrum", "--model", "ho1d", "--observable", "H"}, "ho1d_spectrum.json"},
      {{"verify", "--model", "so3", "--n", "4"}, "so3_n4_verify.json"},
      {{"levels", "--model", "pendulum", "--hbar", "0.1"},
       "pendulum_levels_0.1.json"},
  };
  for (const auto &[args, file] : cmds) {
    std::string a, b;
    run_cli(args, &a);
    run_cli(args, &b);
    std::ifstream in(golden / file, std::ios::binary);
    std::ostringstream want;
    want << in.rdbuf();
    r.require(a == b, file + ": runs differ");
    r.require(a == want.str(), file + ": differs from golden");
  }
  if (r.pass)
    r.detail = "3 golden commands byte-identical across runs and to goldens";
  return r;
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

} // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> all = {
      {"1", "1-D oscillator spectrum", c1},
      {"2", "Bargmann-equivalent ladder", c2},
      {"3", "SO(3) irreducible representation", c3},
      {"4", "quantizability condition", c4},
      {"5", "2-D oscillator degeneracy", c5},
      {"6", "pendulum action oracle", c6},
      {"7a", "pendulum levels, hbar = 0.1", c7a},
      {"7b", "pendulum first level, hbar = 0.01", c7b},
      {"8", "operator identity suite", c8},
      {"9", "parser and differentiation", c9},
      {"10", "determinism", c10},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool ok = true;
  int ran = 0;
  for (const auto &c : all) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
      continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    ok = ok && o.pass;
    std::printf("%s  criterion %-3s %s: %s\n", o.pass ? "PASS" : "FAIL",
                c.id.c_str(), c.title.c_str(), o.detail.c_str());
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion\n");
    return 2;
  }
  return ok ? 0 : 1;
}
