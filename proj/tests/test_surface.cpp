#include "nodal_contact/errors.hpp"
#include "nodal_contact/surface.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nodal_contact;

namespace {

DiscreteSurface unitSquare() {
  // Two right isosceles triangles sharing the diagonal 0-2.
  return DiscreteSurface::fromEmbedding({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}},
                                        {{0, 1, 2}, {0, 2, 3}});
}

} // namespace

TEST(Surface, SingleTriangleCounts) {
  auto s = DiscreteSurface::fromLengths(3, {{0, 1, 2}}, [](int, int) { return 1.0; });
  EXPECT_EQ(s.numVertices(), 3);
  EXPECT_EQ(s.numEdges(), 3);
  EXPECT_EQ(s.numFaces(), 1);
  EXPECT_EQ(s.eulerCharacteristic(), 1);
  EXPECT_EQ(s.genus(), 0);
  ASSERT_EQ(s.boundaryLoops().size(), 1u);
  EXPECT_EQ(s.boundaryLoops()[0], (BoundaryLoop{0, 1, 2}));
  EXPECT_NEAR(s.totalArea(), std::sqrt(3.0) / 4.0, 1e-15);
}

TEST(Surface, SquareBoundaryFollowsFaceOrientation) {
  auto s = unitSquare();
  ASSERT_EQ(s.boundaryLoops().size(), 1u);
  EXPECT_EQ(s.boundaryLoops()[0], (BoundaryLoop{0, 1, 2, 3}));
  EXPECT_TRUE(s.isBoundaryVertex(2));
  EXPECT_FALSE(s.isClosed());
  const auto diag = s.edgeId(2, 0);
  ASSERT_TRUE(diag.has_value());
  EXPECT_GE(s.edgeFaces()[*diag][1], 0);
}

TEST(Surface, RejectsTriangleInequalityViolation) {
  EXPECT_THROW(DiscreteSurface::fromLengths(3, {{0, 1, 2}},
                                            [](int i, int j) { return i + j == 1 ? 3.0 : 1.0; }),
               GeometryError);
}

TEST(Surface, RejectsZeroAreaFace) {
  EXPECT_THROW(DiscreteSurface::fromEmbedding({{0, 0, 0}, {1, 0, 0}, {2, 1e-9, 0}}, {{0, 1, 2}}),
               GeometryError);
}

TEST(Surface, RejectsInconsistentOrientation) {
  EXPECT_THROW(DiscreteSurface::fromEmbedding({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}},
                                              {{0, 1, 2}, {0, 1, 3}}),
               GeometryError);
}

TEST(Surface, RejectsBowtieVertex) {
  EXPECT_THROW(DiscreteSurface::fromEmbedding(
                   {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}},
                   {{0, 1, 2}, {0, 3, 4}}),
               GeometryError);
}

TEST(Surface, RejectsUnusedVertexAndDisconnected) {
  EXPECT_THROW(DiscreteSurface::fromEmbedding({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}}, {{0, 1, 2}}),
               GeometryError);
  EXPECT_THROW(DiscreteSurface::fromEmbedding(
                   {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {6, 0, 0}, {5, 1, 0}},
                   {{0, 1, 2}, {3, 4, 5}}),
               GeometryError);
}

TEST(Surface, RequestedLoopRotationIsKept) {
  auto base = unitSquare();
  DiscreteSurface::Extras extras;
  extras.boundaryLoops = std::vector<BoundaryLoop>{{2, 3, 0, 1}};
  auto s = DiscreteSurface::fromLengths(
      4, base.faces(), [&](int i, int j) { return base.edgeLength(i, j); }, extras);
  EXPECT_EQ(s.boundaryLoops()[0], (BoundaryLoop{2, 3, 0, 1}));

  extras.boundaryLoops = std::vector<BoundaryLoop>{{0, 3, 2, 1}};
  EXPECT_THROW(DiscreteSurface::fromLengths(
                   4, base.faces(), [&](int i, int j) { return base.edgeLength(i, j); }, extras),
               GeometryError);
}

TEST(Surface, HeronAndCotangent) {
  EXPECT_NEAR(triangleArea(3, 4, 5), 6.0, 1e-14);
  EXPECT_NEAR(triangleArea(5, 3, 4), 6.0, 1e-14);
  EXPECT_NEAR(cotOpposite(3, 4, 5), 0.0, 1e-15);
  // Equilateral: cot(60 degrees).
  EXPECT_NEAR(cotOpposite(1, 1, 1), 1.0 / std::sqrt(3.0), 1e-14);
}

TEST(Surface, CornerAnglesSumToPi) {
  auto s = DiscreteSurface::fromLengths(3, {{0, 1, 2}}, [](int i, int j) { return 1.0 + 0.1 * (i + j); });
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += s.cornerAngle(0, c);
  EXPECT_NEAR(sum, std::numbers::pi, 1e-14);
}

TEST(Surface, WithEdgeLengthsRevalidatesAndChangesFingerprint) {
  auto s = unitSquare();
  std::vector<double> l(s.edgeLengths().begin(), s.edgeLengths().end());
  for (double& x : l) x *= 2.0;
  auto t = s.withEdgeLengths(l);
  EXPECT_NEAR(t.totalArea(), 4.0, 1e-14);
  EXPECT_NE(s.fingerprint(), t.fingerprint());
  EXPECT_EQ(s.fingerprint(), unitSquare().fingerprint());
  l[0] = 100.0;
  EXPECT_THROW(s.withEdgeLengths(l), GeometryError);
}
