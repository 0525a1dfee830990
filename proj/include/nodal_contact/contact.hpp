#pragma once

#include "nodal_contact/nodal.hpp"
#include "nodal_contact/spectral.hpp"
#include "nodal_contact/surface.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace nodal_contact {

// alpha = f dt + beta on the thickening Sigma x (-1, 1), with beta the
// Hodge dual of df scaled by 1/lambda. beta is stored per edge in the
// direction a -> b of surface.edges().
struct InducedContactForm {
  double lambda = 0.0;  // sqrt of the Laplace eigenvalue
  Eigen::VectorXd f;
  std::vector<double> beta;
  std::string surfaceRef;

  double betaAlong(const DiscreteSurface& surface, VertexId from, VertexId to) const;
};

InducedContactForm induceContactForm(const DiscreteSurface& surface, const EigenPair& pair);

// Same construction for an arbitrary function and contact constant.
InducedContactForm induceContactForm(const DiscreteSurface& surface, const Eigen::VectorXd& f, double lambda);

struct ContactConditionReport {
  double minQ = 0.0;
  double maxQ = 0.0;
  VertexId argmin = -1;
  bool positive = false;
  std::vector<double> q;
};

inline constexpr double kContactThreshold = 1e-8;

// q(v) = f(v)^2 + |grad f(v)|^2 / lambda^2, which is g(alpha, alpha) at v.
// The vertex gradient is the area-weighted mean of face gradients in a
// tangent frame obtained by unfolding the star of v.
ContactConditionReport verifyContactCondition(const DiscreteSurface& surface, const InducedContactForm& form);

struct CurlResiduals {
  double r1 = 0.0;  // |*df - lambda beta| / |*df|
  double r2 = 0.0;  // |*d beta - lambda f|_B / |f|_B
};

// *d beta is the dual-cell circulation of beta divided by the cell area,
// with the area taken from the consistent mass matrix.
CurlResiduals verifyCurlEigenform(const DiscreteSurface& surface, const InducedContactForm& form);

enum class Tightness { Tight, Overtwisted, Indeterminate };

std::string toString(Tightness t);

struct TightnessVerdict {
  Tightness verdict = Tightness::Indeterminate;
  std::string reason;
};

// Giroux's criterion on the dividing set given by the nodal report.
TightnessVerdict classifyTightness(int genus, const NodalReport& report);
TightnessVerdict classifyTightness(const DiscreteSurface& surface, const NodalReport& report);

void writeContactForm(const std::filesystem::path& path, const DiscreteSurface& surface,
                      const InducedContactForm& form);

} // namespace nodal_contact
