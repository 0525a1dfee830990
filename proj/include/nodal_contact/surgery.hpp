#pragma once

#include "nodal_contact/generators.hpp"
#include "nodal_contact/surface.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nodal_contact {

// Shortest edge-path distances. initial[i] is the starting distance of
// sources[i] (zero when initial is empty).
std::vector<double> dijkstra(const DiscreteSurface& surface, std::span<const VertexId> sources,
                             std::span<const double> initial = {});

struct DiscSplit {
  DiscreteSurface remainder;
  DiscreteSurface disc;
  // New id -> original id, in increasing original order.
  std::vector<VertexId> remainderToOriginal;
  std::vector<VertexId> discToOriginal;
  // Original id -> new id, -1 when absent.
  std::vector<VertexId> originalToRemainder;
  std::vector<VertexId> originalToDisc;
  // Index of the cut loop among remainder.boundaryLoops().
  int cutLoop = 0;
};

// Cuts out the faces whose three vertices all lie within edge-path distance
// radius of center. The cut loop of the remainder starts at its smallest
// original id; the disc's loop starts at the same vertex and runs the
// opposite way.
DiscSplit splitDisc(const DiscreteSurface& surface, VertexId center, double radius);
DiscreteSurface removeDisc(const DiscreteSurface& surface, VertexId center, double radius);

struct GluedFamilySpec {
  DiscreteSurface spherePart;  // one boundary loop
  DiscreteSurface handlePart;  // one boundary loop, unscaled metric
  double epsilon = 1.0;
};

struct FaceRange {
  FaceId begin = 0;
  FaceId end = 0;
  bool contains(FaceId f) const { return f >= begin && f < end; }
};

struct GluedSurface {
  DiscreteSurface surface;
  FaceRange sphereFaces;
  FaceRange handleFaces;
  std::vector<VertexId> handleToGlued;
};

// Identifies sphere loop vertex a_i with handle loop vertex b_{-i mod N} and
// scales handle lengths by epsilon/2. Sphere vertex ids and faces come first.
GluedSurface glueFamily(const GluedFamilySpec& spec);

// Multiplies each edge length by 1 + amplitude*(2u - 1), u a hash of
// (seed, edge). Only edges all of whose faces lie in support are touched.
DiscreteSurface perturbMetric(const DiscreteSurface& surface, double amplitude, std::uint64_t seed,
                              std::span<const FaceId> support);

// Whole-surface perturbation.
DiscreteSurface perturbMetric(const DiscreteSurface& surface, double amplitude, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

struct HandleCut {
  DiscreteSurface handle;
  HoleTemplate hole;
};

// Removes the disc of the given radius around the marked vertex and records
// the hole in the top-face chart of that vertex.
HandleCut cutHandle(const GenusSurface& genus, double radius);

} // namespace nodal_contact
