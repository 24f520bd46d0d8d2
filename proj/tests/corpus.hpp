#ifndef BSHQ_TESTS_CORPUS_HPP
#define BSHQ_TESTS_CORPUS_HPP

#include <string>
#include <vector>

// Expressions covering every grammar production, for round-trip checks.
inline const std::vector<std::string> &expression_corpus() {
  static const std::vector<std::string> corpus = {
      "2*A1",
      "r^2 - A1^2",
      "A1",
      "-A1",
      "--A1",
      "-(A1 + A2)",
      "A1 - (A2 - A3)",
      "A1 - A2 - A3",
      "(A1 - A2) - A3",
      "A1 / (A2 / A3)",
      "A1 / A2 / A3",
      "A1 * (A2 + A3)",
      "(A1 + A2) * (A1 - A2)",
      "A1^2",
      "(A1 + 1)^3",
      "(-A1)^2",
      "-A1^2",
      "A1^-1",
      "A1^0",
      "(2^2)^1",
      "sqrt(2*A1)",
      "sin(alpha)",
      "1 - cos(alpha)",
      "exp(-A1/2)",
      "conj(chi1)",
      "(chi1 + conj(chi1))/2",
      "(chi1 - conj(chi1))/(2*i)",
      "A1*chi1 + A2*conj(chi2)",
      "sqrt(A1)*chi1",
      "1.5e-3*A1",
      "0.5",
      "1e10",
      "hbar*A1",
      "A1 + A2 + A3 + A4",
      "A1*A2*A3",
      "A1*(A2*A3)",
      "(A1*A2)*A3",
      "A1 - -A2",
      "A1 + -A2",
      "A1 * -A2",
      "-(-(A1))",
      "((((A1))))",
      "sin(cos(exp(sqrt(A1))))",
      "A12 + chi12",
      "my_const*A1 + other",
      "(A1^2 + A2^2)^2",
      "A1/(2*hbar) - 3",
      "(1 - cos(alpha))^2/4",
      "exp(A1)^-2",
      "A1 - (A2 + A3)*(A4 - A5)/(A6 + 1)",
  };
  return corpus;
}

#endif
