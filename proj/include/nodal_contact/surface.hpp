#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace nodal_contact {

using VertexId = int;
using FaceId = int;
using EdgeId = int;
using Face = std::array<VertexId, 3>;
using Vec3 = std::array<double, 3>;
using BoundaryLoop = std::vector<VertexId>;

// Unoriented edge, stored with a < b.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline std::uint64_t edgeKey(VertexId i, VertexId j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

/// Triangulated surface whose Riemannian metric is given intrinsically by
/// positive edge lengths (a piecewise-flat metric). Instances are immutable;
/// every modifying operation returns a new, fully re-validated surface.
///
/// Faces are consistently oriented triangles. Boundary loops are ordered in
/// the direction induced by the face orientation. An optional embedding is
/// carried along for plotting only and never enters any metric computation.
class DiscreteSurface {
public:
  using LengthFn = std::function<double(VertexId, VertexId)>;

  struct Extras {
    // When given, each loop must be a cyclic rotation of a computed boundary
    // loop; the rotation (start vertex) is preserved. Otherwise loops start at
    // their smallest vertex id.
    std::optional<std::vector<BoundaryLoop>> boundaryLoops;
    std::optional<std::vector<Vec3>> embedding;
  };

  static DiscreteSurface fromLengths(int numVertices, std::vector<Face> faces,
                                     const LengthFn& length, Extras extras = {});

  // Edge lengths are Euclidean chords of the embedding.
  static DiscreteSurface fromEmbedding(std::vector<Vec3> positions, std::vector<Face> faces,
                                       std::optional<std::vector<BoundaryLoop>> loops = {});

  int numVertices() const { return numVertices_; }
  int numEdges() const { return static_cast<int>(edges_.size()); }
  int numFaces() const { return static_cast<int>(faces_.size()); }

  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const double> edgeLengths() const { return lengths_; }
  double edgeLength(EdgeId e) const { return lengths_[e]; }
  double edgeLength(VertexId i, VertexId j) const;
  std::optional<EdgeId> edgeId(VertexId i, VertexId j) const;

  // faceEdges()[f][c] is the edge opposite corner c of face f.
  const std::vector<std::array<EdgeId, 3>>& faceEdges() const { return faceEdges_; }
  // Incident faces of an edge; the second entry is -1 on the boundary.
  const std::vector<std::array<FaceId, 2>>& edgeFaces() const { return edgeFaces_; }

  const std::vector<BoundaryLoop>& boundaryLoops() const { return loops_; }
  const std::optional<std::vector<Vec3>>& embedding() const { return embedding_; }
  bool isClosed() const { return loops_.empty(); }
  bool isBoundaryVertex(VertexId v) const { return boundaryVertex_[v]; }

  int eulerCharacteristic() const { return numVertices() - numEdges() + numFaces(); }
  int genus() const { return genus_; }

  // Neighbouring vertices in increasing id order.
  const std::vector<std::vector<VertexId>>& adjacency() const { return adjacency_; }
  // Incident faces of each vertex in increasing id order.
  const std::vector<std::vector<FaceId>>& vertexFaces() const { return vertexFaces_; }

  // Side lengths of face f, ordered as the edges opposite corners 0, 1, 2.
  std::array<double, 3> faceLengths(FaceId f) const;
  double faceArea(FaceId f) const;
  double totalArea() const;
  // Interior angle at corner c of face f.
  double cornerAngle(FaceId f, int c) const;

  // Same combinatorics, new metric. Lengths are indexed by EdgeId.
  DiscreteSurface withEdgeLengths(std::vector<double> lengths) const;
  DiscreteSurface withEmbedding(std::optional<std::vector<Vec3>> embedding) const;

  // Stable 64-bit hash of combinatorics and metric, rendered as hex.
  std::string fingerprint() const;

private:
  DiscreteSurface() = default;
  void build(std::vector<BoundaryLoop> requestedLoops, bool loopsRequested);
  void validateMetric() const;

  int numVertices_ = 0;
  std::vector<Face> faces_;
  std::vector<Edge> edges_;
  std::vector<double> lengths_;
  std::unordered_map<std::uint64_t, EdgeId> edgeIndex_;
  std::vector<std::array<EdgeId, 3>> faceEdges_;
  std::vector<std::array<FaceId, 2>> edgeFaces_;
  std::vector<BoundaryLoop> loops_;
  std::vector<bool> boundaryVertex_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::vector<FaceId>> vertexFaces_;
  std::optional<std::vector<Vec3>> embedding_;
  int genus_ = 0;
};

// Heron's formula in the numerically stable ordering.
double triangleArea(double a, double b, double c);

// Cotangent of the angle opposite side c.
double cotOpposite(double a, double b, double c);

} // namespace nodal_contact
