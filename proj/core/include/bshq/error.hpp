#ifndef BSHQ_ERROR_HPP
#define BSHQ_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bshq {

// Root of every exception thrown by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. position is 1-based.
class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string &message)
      : Error("parse error at position " + std::to_string(position) + ": " +
              message),
        position_(position), detail_(message) {}

  std::size_t position() const noexcept { return position_; }
  // The message without the position prefix.
  const std::string &detail() const noexcept { return detail_; }

private:
  std::size_t position_;
  std::string detail_;
};

// Structural or semantic problem with a model, region, profile or observable.
class ModelError : public Error {
public:
  using Error::Error;
};

// Failed evaluation of an expression (unbound symbol, domain error, ...).
class EvaluationError : public Error {
public:
  using Error::Error;
};

// Quadrature, root finding or eigensolver failure.
class NumericalError : public Error {
public:
  using Error::Error;
};

// The ladder recursion cannot satisfy both boundary conditions.
class InconsistentQuantization : public ModelError {
public:
  InconsistentQuantization(double residual, const std::string &message)
      : ModelError(message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace bshq

#endif
