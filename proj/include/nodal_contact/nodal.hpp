#pragma once

#include "nodal_contact/surface.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace nodal_contact {

// Relative zero threshold: |f(v)| below this fraction of max|f| counts as a
// vertex zero, treated as positive with value 0.
inline constexpr double kZeroThreshold = 1e-10;

// Zero of the linear interpolant on an edge, at t of the way from the
// positive vertex to the negative one.
struct Crossing {
  EdgeId edge = -1;
  VertexId positive = -1;
  VertexId negative = -1;
  double t = 0.0;
};

// One curve of the zero set. Crossings are ordered along the curve with the
// positive side on the left. Open curves end on the surface boundary.
struct NodalComponent {
  std::vector<Crossing> crossings;
  bool closed = true;
};

struct NodalSet {
  std::vector<NodalComponent> components;
  std::vector<VertexId> vertexZeros;
  bool nearSingular() const { return !vertexZeros.empty(); }
};

NodalSet extractNodalSet(const DiscreteSurface& surface, const Eigen::VectorXd& f);

// Connected components of {f >= 0} and {f < 0} for the piecewise-linear
// interpolant, with vertex zeros counted as positive.
int countNodalDomains(const DiscreteSurface& surface, const Eigen::VectorXd& f);

struct CutPiece {
  int eulerCharacteristic = 0;
  int boundaryLoops = 0;
  int genus = 0;
  bool isDisc() const { return eulerCharacteristic == 1 && boundaryLoops == 1; }
};

// Pieces of the surface cut along the selected closed components.
std::vector<CutPiece> cutPieces(const DiscreteSurface& surface, const NodalSet& nodal,
                                std::span<const int> componentIndices);

// A closed component is contractible when cutting along it splits off a disc.
bool isContractible(const DiscreteSurface& surface, const NodalSet& nodal, int componentIndex);

// A component is contained in the region when every face next to one of
// its crossed edges lies in the region.
std::vector<bool> checkContainment(const DiscreteSurface& surface, const NodalSet& nodal,
                                   std::span<const FaceId> region);

struct NodalReport {
  int componentCount = 0;
  int domainCount = 0;
  std::vector<bool> contractible;
  std::optional<std::vector<bool>> contained;
  bool nearSingular = false;
};

NodalReport analyzeNodalSet(const DiscreteSurface& surface, const Eigen::VectorXd& f,
                            std::optional<std::span<const FaceId>> region = std::nullopt);

void writeNodalJson(const std::filesystem::path& path, const NodalSet& nodal, const NodalReport& report);

} // namespace nodal_contact
