#pragma once

#include <stdexcept>
#include <string>

namespace nodal_contact {

// Invalid mesh data: triangle inequality, degenerate faces, non-manifold
// or inconsistently oriented complexes, Euler characteristic mismatches.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A metric perturbation produced an invalid triangle. Callers may retry with
// a smaller amplitude.
class PerturbationError : public GeometryError {
public:
  using GeometryError::GeometryError;
};

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, double bestResidual)
      : std::runtime_error(what), bestResidual_(bestResidual) {}

  double bestResidual() const { return bestResidual_; }

private:
  double bestResidual_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace nodal_contact
