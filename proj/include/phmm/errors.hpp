#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phmm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model violates a probability constraint (range or row normalization).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Malformed caller input: bad sequence symbols, mismatched lengths,
/// out-of-range configuration values, unparsable files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The observations (and labels) have probability zero under the model.
class DegenerateLikelihood : public Error {
 public:
  DegenerateLikelihood(std::size_t timestep, const std::string& what)
      : Error(what + " (timestep " + std::to_string(timestep) + ")"),
        timestep_(timestep) {}

  /// Zero-based index of the first step at which every state had zero mass.
  std::size_t timestep() const noexcept { return timestep_; }

 private:
  std::size_t timestep_;
};

/// A state received zero expected occupancy, so its re-estimate is 0/0.
class DegenerateStatistics : public Error {
 public:
  DegenerateStatistics(int state, const std::string& what)
      : Error(what + " (state " + std::to_string(state) + ")"), state_(state) {}

  int state() const noexcept { return state_; }

 private:
  int state_;
};

/// An exhaustive enumeration was requested over too many paths.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

/// Baseline error does not exceed oracle error, so the margin is empty.
class UndefinedMargin : public Error {
 public:
  using Error::Error;
};

}  // namespace phmm
