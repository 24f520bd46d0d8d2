#include <doctest.h>

#include <cmath>
#include <random>

#include "bshq/eigensolver.hpp"
#include "bshq/error.hpp"
#include "bshq/operator.hpp"
#include "oracles.hpp"

using namespace bshq;

namespace {

StateSpacePtr chain(std::int64_t hi, double hbar = 1.0) {
  RealBindings k{{"hbar", hbar}};
  return enumerate_states(LatticeRegion::parse(1, {"A1 >= 0"}, k),
                          {{0, hi}}, LatticeConfig(hbar, 1));
}

StateSpacePtr grid(std::int64_t hi) {
  RealBindings k{{"hbar", 1.0}};
  return enumerate_states(LatticeRegion::parse(2, {"A1 >= 0", "A2 >= 0"}, k),
                          {{0, hi}, {0, hi}}, LatticeConfig(1.0, 2));
}

oracle::Matrix to_dense(const LatticeOperator &op) {
  oracle::Matrix m(op.dimension());
  auto d = op.dense();
  for (std::size_t i = 0; i < d.size(); ++i)
    m.a[i] = d[i];
  return m;
}

std::vector<double> sqrt_2m(std::size_t n) {
  std::vector<double> b(n);
  for (std::size_t m = 0; m < n; ++m)
    b[m] = std::sqrt(2.0 * static_cast<double>(m));
  return b;
}

} // namespace

TEST_CASE("diagonal operators") {
  auto s = chain(5);
  LatticeOperator one = diagonal_op(parse_expression("1"), s);
  CHECK(one.is_diagonal());
  CHECK(interior_deviation(one, identity(s)) == 0.0);
  CHECK(one.max_abs() == 1.0);

  LatticeOperator a = diagonal_op(parse_expression("A1"), s);
  for (std::size_t i = 0; i < s->dimension(); ++i)
    CHECK(a.element(i, i) == complex(static_cast<double>(i)));

  LatticeOperator two = complex(2.0) * identity(s);
  for (std::size_t i = 0; i < s->dimension(); ++i)
    CHECK(two.element(i, i) == complex(2.0));

  LatticeOperator z = diagonal_op(parse_expression("0*A1"), s);
  CHECK(z.bands().empty());
  CHECK(z.max_abs() == 0.0);
}

TEST_CASE("diagonal evaluation errors name the state") {
  auto s = chain(3);
  CHECK_THROWS_WITH_AS(diagonal_op(parse_expression("1/(A1 - 2)"), s),
                       doctest::Contains("(2)"), EvaluationError);
}

TEST_CASE("shift operators and their adjoints") {
  auto s = chain(4);
  LatticeOperator low = unit_shift(s, 0, -1);
  // sigma_0 is annihilated: its lowered torus is empty.
  CHECK(apply(low, StateVector::basis(s, 0)).max_abs() == 0.0);
  StateVector v = apply(low, StateVector::basis(s, 3));
  CHECK(v[2] == complex(1.0));

  LatticeOperator up = unit_shift(s, 0, +1);
  CHECK(interior_deviation(adjoint(low), up) == 0.0);
  // The top state is on the truncation edge: its target is cut by the box.
  CHECK(apply(up, StateVector::basis(s, 4)).max_abs() == 0.0);

  LatticeOperator chi = shift_op(s, 0, -1, std::span<const double>(sqrt_2m(5)));
  auto d = to_dense(chi);
  CHECK(d(0, 1) == complex(std::sqrt(2.0)));
  CHECK(d(2, 3) == complex(std::sqrt(6.0)));
  CHECK(d(1, 0) == complex(0.0));
  CHECK(oracle::max_abs_diff(to_dense(adjoint(chi)), oracle::dagger(d)) == 0.0);
}

TEST_CASE("commutators agree with dense matrix products") {
  auto s = chain(10, 0.5);
  LatticeOperator chi = shift_op(s, 0, -1, std::span<const double>(sqrt_2m(11)));
  LatticeOperator chibar = adjoint(chi);
  LatticeOperator a = diagonal_op(parse_expression("A1"), s);

  auto dense = oracle::commutator(to_dense(chi), to_dense(chibar));
  CHECK(oracle::max_abs_diff(to_dense(commutator(chi, chibar)), dense) <=
        1e-13);
  auto dense2 = oracle::commutator(to_dense(chi), to_dense(a));
  CHECK(oracle::max_abs_diff(to_dense(commutator(chi, a)), dense2) <= 1e-13);
  CHECK(oracle::max_abs_diff(to_dense(chi * a),
                             oracle::multiply(to_dense(chi), to_dense(a))) <=
        1e-13);
}

TEST_CASE("Dirac ladder on ho1d: [chi, chibar] = 2 hbar on interior states") {
  const double hbar = 0.25;
  auto s = chain(12, hbar);
  std::vector<double> b(13);
  for (std::size_t m = 0; m < b.size(); ++m)
    b[m] = std::sqrt(2.0 * m * hbar);
  LatticeOperator chi = shift_op(s, 0, -1, std::span<const double>(b));
  LatticeOperator c = commutator(chi, adjoint(chi));
  CHECK(interior_deviation(c, complex(2.0 * hbar) * identity(s)) <= 1e-14);
  // On the edge column the truncated raising operator breaks the identity.
  CHECK(std::abs(c.element(12, 12) - complex(2.0 * hbar)) > 1.0);
}

TEST_CASE("commuting axes on a product lattice") {
  auto s = grid(4);
  LatticeOperator a1 = unit_shift(s, 0, -1), a2 = unit_shift(s, 1, -1);
  CHECK(commutator(a1, a2).max_abs() == 0.0);
  CHECK(commutator(a1, adjoint(a2)).max_abs() == 0.0);
}

TEST_CASE("operators on different spaces do not mix") {
  auto s = chain(3), t = chain(4);
  CHECK_THROWS_AS(identity(s) + identity(t), ModelError);
  CHECK_THROWS_AS(compose(identity(s), identity(t)), ModelError);
}

TEST_CASE("quantize a first-degree observable") {
  auto s = chain(4);
  std::map<std::size_t, LatticeOperator> lowering;
  lowering.emplace(0,
                   shift_op(s, 0, -1, std::span<const double>(sqrt_2m(5))));
  ObservableExpr e =
      split_observable(parse_expression("A1 + (chi1 + conj(chi1))/2"), 1);
  LatticeOperator q = quantize_observable(e, s, lowering);
  CHECK(q.element(0, 0) == complex(0.0));
  CHECK(q.element(3, 3) == complex(3.0));
  CHECK(q.element(2, 3).real() == doctest::Approx(std::sqrt(6.0) / 2));
  CHECK(q.element(3, 2).real() == doctest::Approx(std::sqrt(6.0) / 2));
}

TEST_CASE("inner products of basis states") {
  auto s = grid(3);
  for (std::size_t i = 0; i < s->dimension(); ++i)
    for (std::size_t j = 0; j < s->dimension(); ++j)
      CHECK(inner(StateVector::basis(s, i), StateVector::basis(s, j)) ==
            complex(i == j ? 1.0 : 0.0));
}

TEST_CASE("identity acts trivially") {
  auto s = chain(6);
  std::vector<complex> amp;
  for (std::size_t i = 0; i < s->dimension(); ++i)
    amp.emplace_back(0.5 * i, -1.0 * i);
  StateVector v(s, amp);
  CHECK(apply(identity(s), v).amplitudes() == amp);
}

TEST_CASE("eigenvalues of a diagonal operator are its sorted diagonal") {
  auto s = chain(5);
  LatticeOperator d = diagonal_op(parse_expression("(A1 - 2)^2"), s);
  CHECK(eigenvalues_hermitian(d) == std::vector<double>{0, 1, 1, 4, 4, 9});
}

TEST_CASE("3x3 closed-form spectrum") {
  // (1/sqrt 2) [[0,1,0],[1,0,1],[0,1,0]] and a generic symmetric matrix.
  const double h = 1.0 / std::sqrt(2.0);
  const double m1[3][3] = {{0, h, 0}, {h, 0, h}, {0, h, 0}};
  const double m2[3][3] = {{2.0, -1.3, 0.4}, {-1.3, 0.7, 2.2}, {0.4, 2.2, -1.1}};
  for (auto m : {m1, m2}) {
    std::vector<double> flat;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        flat.push_back(m[i][j]);
    auto got = symmetric_eigenvalues(flat, 3);
    auto want = oracle::symmetric3_eigenvalues(m);
    for (int i = 0; i < 3; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-13));
  }
  auto got = symmetric_eigenvalues({0, h, 0, h, 0, h, 0, h, 0}, 3);
  CHECK(got[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(got[1]) <= 1e-14);
  CHECK(got[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Hermitian eigensolver invariants") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const std::size_t n = 12;
  std::vector<complex> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      complex z(g(rng), i == j ? 0.0 : g(rng));
      a[i * n + j] = z;
      a[j * n + i] = std::conj(z);
    }
  auto ev = hermitian_eigenvalues(a, n);
  CHECK(std::is_sorted(ev.begin(), ev.end()));

  double trace = 0.0, sum = 0.0, fro = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    trace += a[i * n + i].real();
  for (double e : ev)
    sum += e, sq += e * e;
  for (const auto &z : a)
    fro += std::norm(z);
  CHECK(sum == doctest::Approx(trace).epsilon(1e-12));
  CHECK(sq == doctest::Approx(fro).epsilon(1e-12));

  // O (+) O has every eigenvalue twice.
  std::vector<complex> doubled(4 * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      doubled[i * 2 * n + j] = a[i * n + j];
      doubled[(i + n) * 2 * n + j + n] = a[i * n + j];
    }
  auto ev2 = hermitian_eigenvalues(doubled, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(ev2[2 * i] == doctest::Approx(ev[i]).epsilon(1e-11));
    CHECK(ev2[2 * i + 1] == doctest::Approx(ev[i]).epsilon(1e-11));
  }

  // Conjugation by a permutation leaves the spectrum unchanged.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i)
    perm[i] = (5 * i + 3) % n;
  std::vector<complex> p(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p[i * n + j] = a[perm[i] * n + perm[j]];
  auto ev3 = hermitian_eigenvalues(p, n);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(ev3[i] == doctest::Approx(ev[i]).epsilon(1e-11));
}

TEST_CASE("non-Hermitian input is rejected") {
  auto s = chain(3);
  LatticeOperator low = unit_shift(s, 0, -1);
  CHECK_THROWS_AS(eigenvalues_hermitian(low), NumericalError);
}

TEST_CASE("eigensolver is deterministic") {
  auto s = chain(30);
  std::vector<double> b(31);
  for (std::size_t m = 0; m < b.size(); ++m)
    b[m] = std::sqrt(2.0 * m);
  LatticeOperator chi = shift_op(s, 0, -1, std::span<const double>(b));
  LatticeOperator x = complex(0.5) * (chi + adjoint(chi));
  CHECK(eigenvalues_hermitian(x) == eigenvalues_hermitian(x));
}
