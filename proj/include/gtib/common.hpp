#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gtib {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Which end of the line the spectral data (and the GLME) refers to.
enum class Side { Left, Right };

/// Selects the sign in the coupled GLME pair. `WithDiscrete` is the
/// focusing case (upper sign), `ContinuousOnly` the defocusing one.
enum class SignMode { WithDiscrete, ContinuousOnly };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

inline const char* to_string(SignMode m) {
  return m == SignMode::WithDiscrete ? "with_discrete" : "continuous_only";
}

// Error hierarchy. Every numerical failure carries enough context for the
// CLI to map it onto an exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A kernel argument outside the synthesized table.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A divergence-flagged kernel entry would enter a linear system.
class CutRequired : public Error {
 public:
  CutRequired(const std::string& what, std::ptrdiff_t index)
      : Error(what), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// The block recursion lost stability at `step`.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace gtib
