#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace isograph {

/// Dense vertex slot id. Zero-based in memory; the file formats are one-based.
using Vertex = std::size_t;
using Complex = std::complex<double>;
using VertexList = std::vector<Vertex>;

/// Absolute tolerance used for lambda/loop-weight equality and singular denominators.
inline constexpr double kDefaultTol = 1e-12;

enum class ErrorKind {
  InvalidInput,
  NotStructural,
  SingularWeight,
  InvalidMode,
  NotPrimitive,
  IterationFailed,
  Ambiguous,
  StuckSimulation,
  RejectedDelta,
  GenerationFailed,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace isograph
