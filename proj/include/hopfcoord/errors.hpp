#ifndef HOPFCOORD_ERRORS_HPP_
#define HOPFCOORD_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hopfcoord {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad shapes, non-finite input, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A costate outside the conjugate's effective domain reached the Hopf
// objective. This indicates a projection bug, not bad user input.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

// NaN or inf produced inside a computation.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// A pair solve inside joint_value did not converge.
class SolverFailure : public Error {
 public:
  SolverFailure(int vehicle, int goal, const std::string& what)
      : Error(what), vehicle_(vehicle), goal_(goal) {}
  int vehicle() const { return vehicle_; }
  int goal() const { return goal_; }

 private:
  int vehicle_;
  int goal_;
};

// The outer min-time iteration ran out of iterations.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// phi(x, t) stayed positive up to t_max.
class UnreachableFormation : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Scenario validation; carries every problem found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> messages)
      : Error(join(messages)), messages_(std::move(messages)) {}
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  static std::string join(const std::vector<std::string>& messages) {
    std::string out;
    for (const auto& m : messages) {
      if (!out.empty()) out += "\n";
      out += m;
    }
    return out;
  }
  std::vector<std::string> messages_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hopfcoord

#endif  // HOPFCOORD_ERRORS_HPP_
