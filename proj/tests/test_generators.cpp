#include "nodal_contact/errors.hpp"
#include "nodal_contact/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nodal_contact;

TEST(RoundSphere, IcosahedronCounts) {
  auto s = buildRoundSphere(0);
  EXPECT_EQ(s.numVertices(), 12);
  EXPECT_EQ(s.numFaces(), 20);
  EXPECT_EQ(s.numEdges(), 30);
  EXPECT_EQ(s.eulerCharacteristic(), 2);
  EXPECT_TRUE(s.isClosed());
}

TEST(RoundSphere, OneSubdivision) {
  auto s = buildRoundSphere(1);
  EXPECT_EQ(s.numVertices(), 42);
  EXPECT_EQ(s.numFaces(), 80);
  EXPECT_EQ(s.numEdges(), 120);
}

TEST(RoundSphere, AreaApproachesFourPi) {
  const double area = buildRoundSphere(4).totalArea();
  EXPECT_LT(std::abs(area - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi), 0.02);
  EXPECT_LT(area, 4.0 * std::numbers::pi);  // inscribed polyhedron
}

TEST(RoundSphere, SizeGuard) { EXPECT_THROW(buildRoundSphere(9), GeometryError); }

TEST(FlatTorus, Counts) {
  auto s = buildFlatTorus(3, 3);
  EXPECT_EQ(s.numVertices(), 9);
  EXPECT_EQ(s.numFaces(), 18);
  EXPECT_EQ(s.numEdges(), 27);
  EXPECT_EQ(s.eulerCharacteristic(), 0);
  EXPECT_EQ(s.genus(), 1);
}

TEST(FlatTorus, UnitArea) {
  EXPECT_NEAR(buildFlatTorus(64, 64).totalArea(), 1.0, 1e-12);
  EXPECT_NEAR(buildFlatTorus(5, 7, false).totalArea(), 1.0, 1e-14);
}

TEST(FlatTorus, RejectsSmallGrid) { EXPECT_THROW(buildFlatTorus(2, 5), GeometryError); }

TEST(GenusSurface, EulerCharacteristic) {
  for (int g = 1; g <= 3; ++g) {
    auto gs = buildGenusG(g, 2);
    EXPECT_EQ(gs.surface.genus(), g);
    EXPECT_EQ(gs.surface.eulerCharacteristic(), 2 - 2 * g);
    EXPECT_TRUE(gs.surface.isClosed());
  }
}

TEST(GenusSurface, MarkedVertexHasFlatStar) {
  auto gs = buildGenusG(2, 4);
  const auto& s = gs.surface;
  double sum = 0.0;
  for (FaceId f : s.vertexFaces()[gs.marked]) {
    for (int c = 0; c < 3; ++c) {
      if (s.faces()[f][c] == gs.marked) sum += s.cornerAngle(f, c);
    }
  }
  EXPECT_NEAR(sum, 2.0 * std::numbers::pi, 1e-12);
  const Vec3 p = (*s.embedding())[gs.marked];
  EXPECT_DOUBLE_EQ(p[0], 2.0);
  EXPECT_DOUBLE_EQ(p[1], 2.0);
  EXPECT_DOUBLE_EQ(p[2], 1.0);
}

TEST(GenusSurface, Preconditions) {
  EXPECT_THROW(buildGenusG(0, 4), GeometryError);
  EXPECT_THROW(buildGenusG(1, 1), GeometryError);
}

TEST(CappedProfile, ArcLengthParametrisation) {
  CappedProfile p;
  const double total = p.length();
  const double h = 1e-6;
  for (double s = h; s < total - h; s += total / 997.0) {
    const Vec2 a = p.at(s - h), b = p.at(s + h);
    EXPECT_NEAR(std::hypot(b[0] - a[0], b[1] - a[1]) / (2 * h), 1.0, 1e-6) << "s=" << s;
  }
  EXPECT_NEAR(p.at(total)[0], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.at(p.flatRadius)[1], 0.0);
}
