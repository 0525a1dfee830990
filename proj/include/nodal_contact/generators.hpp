#pragma once

#include "nodal_contact/surface.hpp"

#include <array>
#include <optional>
#include <vector>

namespace nodal_contact {

using Vec2 = std::array<double, 2>;

// Icosahedral subdivision of the unit sphere, chordal edge lengths.
DiscreteSurface buildRoundSphere(int subdivisions);

// n x m periodic grid on the unit square. Vertex (i, j) has id i + n*j, with
// i along x. When embed is set, a torus of revolution is attached for plots.
DiscreteSurface buildFlatTorus(int n, int m, bool embed = true);

struct GenusSurface {
  DiscreteSurface surface;
  VertexId marked;  // x1, on the top face; its star is flat
};

// Boundary of a voxel slab [0, 4+2g] x [0, 4] x [0, 1] with g square
// through-holes. Lattice step is 1/resolution.
GenusSurface buildGenusG(int g, int resolution = 4);

// Shape of the hole cut around the marked vertex of a handle, in the top-face
// chart centred at that vertex. loop[j] is the position of the j-th vertex of
// the handle's boundary loop.
struct HoleTemplate {
  std::vector<Vec2> loop;
  // The removed disc, used to fill the hole of the reference surface.
  std::vector<Vec2> discPositions;
  std::vector<Face> discFaces;
  std::vector<VertexId> discLoop;  // disc vertex matching loop[j]
  VertexId discCenter = -1;
};

// Rotationally symmetric cap-and-cylinder surface. The top of the surface is
// an exactly flat disc of radius flatRadius; a rim arc of radius rimRadius
// turning through rimAngle joins it to a spherical zone, followed by a
// cylinder and a closing hemisphere.
struct CappedProfile {
  double flatRadius = 0.65;
  double rimRadius = 0.15;
  double rimAngle = 60.0 * 3.14159265358979323846 / 180.0;
  double cylinderLength = 0.4;
  // Flat rings morph from the hole shape (below morphBegin) to circles
  // (above morphEnd).
  double morphBegin = 0.5;
  double morphEnd = 0.6;
  // Arc-length spacing of rings outside the flat disc; 0 picks the angular
  // spacing of the ring at the flat radius.
  double outerStep = 0.0;

  double sphereRadius() const;
  double length() const;  // arc length from the pole of the cap to the far pole
  // Point (r, z) of the profile at arc length s from the centre of the cap.
  Vec2 at(double s) const;
};

struct CappedSphere {
  DiscreteSurface surface;
  std::optional<VertexId> center;  // present when the hole is filled
  int stableVertexCount = 0;       // vertices shared by every hole scale
  FaceId flatFaceBegin = 0;        // faces before this index lie outside the flat disc
  double holeScale = 0.0;
  std::vector<VertexId> holeRing;  // ring vertex j sits at holeScale * mirror(loop[j])
};

// The flat disc carries concentric rings shaped like the mirrored hole loop,
// shrinking geometrically towards a hole of size holeScale. With fill set the
// hole is closed by the mirrored, scaled template disc; otherwise it is left
// as the single boundary loop, starting at ring vertex 0 and running through
// ring vertices N-1, N-2, ...
CappedSphere buildCappedSphere(const CappedProfile& profile, const HoleTemplate& hole,
                               double holeScale, bool fill);

} // namespace nodal_contact
