#include "nodal_contact/generators.hpp"
#include "nodal_contact/nodal.hpp"
#include "nodal_contact/spectral.hpp"
#include "nodal_contact/surgery.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include <json.hpp>

using namespace nodal_contact;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd gridFunction(int n, double (*fn)(double, double)) {
  Eigen::VectorXd f(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) f[i + n * j] = fn((i + 0.5) / n, (j + 0.37) / n);
  }
  return f;
}

Eigen::Vector3d position(const DiscreteSurface& s, VertexId v) {
  const Vec3& p = (*s.embedding())[v];
  return {p[0], p[1], p[2]};
}

Eigen::VectorXd heightFunction(const DiscreteSurface& s, Eigen::Vector3d axis) {
  axis.normalize();
  Eigen::VectorXd f(s.numVertices());
  for (VertexId v = 0; v < s.numVertices(); ++v) f[v] = position(s, v).dot(axis);
  return f;
}

} // namespace

TEST(NodalSet, SphereEquatorIsOneContractibleCurve) {
  auto s = buildRoundSphere(3);
  auto rep = analyzeNodalSet(s, heightFunction(s, {0.1, 0.2, 1.0}));
  EXPECT_EQ(rep.componentCount, 1);
  EXPECT_EQ(rep.domainCount, 2);
  EXPECT_TRUE(rep.contractible[0]);
  EXPECT_FALSE(rep.nearSingular);
}

TEST(NodalSet, TorusSineHasTwoEssentialCurves) {
  const int n = 32;
  auto t = buildFlatTorus(n, n, false);
  auto f = gridFunction(n, [](double x, double) { return std::sin(2 * kPi * x); });
  auto nodal = extractNodalSet(t, f);
  ASSERT_EQ(nodal.components.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_TRUE(nodal.components[i].closed);
    EXPECT_FALSE(isContractible(t, nodal, i));
    // Each vertical line crosses one column of horizontal and one of diagonal edges.
    EXPECT_EQ(nodal.components[i].crossings.size(), 2u * n);
  }
  EXPECT_EQ(countNodalDomains(t, f), 2);
}

TEST(NodalSet, ShiftedProductHasTwoNegativeIslands) {
  // Lifting sin x sin y joins the positive quadrants and leaves the two
  // negative ones as discs.
  auto t = buildFlatTorus(24, 24, false);
  auto f = gridFunction(24, [](double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y) + 0.1; });
  auto rep = analyzeNodalSet(t, f);
  EXPECT_EQ(rep.domainCount, 3);
  ASSERT_EQ(rep.componentCount, 2);
  EXPECT_TRUE(rep.contractible[0]);
  EXPECT_TRUE(rep.contractible[1]);
}

TEST(NodalSet, BumpOnTorusIsContractible) {
  const int n = 24;
  auto t = buildFlatTorus(n, n, false);
  auto f = gridFunction(n, [](double x, double y) {
    return 0.04 - (x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5);
  });
  auto rep = analyzeNodalSet(t, f);
  ASSERT_EQ(rep.componentCount, 1);
  EXPECT_TRUE(rep.contractible[0]);
  EXPECT_EQ(rep.domainCount, 2);
}

TEST(NodalSet, CrossingsSitOnTheLinearZero) {
  auto s = buildRoundSphere(2);
  auto f = heightFunction(s, {0.3, -0.2, 1.0});
  auto nodal = extractNodalSet(s, f);
  for (const auto& comp : nodal.components) {
    for (const Crossing& c : comp.crossings) {
      EXPECT_GT(f[c.positive], 0.0);
      EXPECT_LT(f[c.negative], 0.0);
      EXPECT_NEAR((1 - c.t) * f[c.positive] + c.t * f[c.negative], 0.0, 1e-15);
    }
  }
}

TEST(NodalSet, PositiveSideOnTheLeft) {
  auto s = buildRoundSphere(2);
  const Eigen::Vector3d axis = Eigen::Vector3d(0.13, 0.07, 1.0).normalized();
  auto f = heightFunction(s, axis);
  auto nodal = extractNodalSet(s, f);
  ASSERT_EQ(nodal.components.size(), 1u);
  ASSERT_FALSE(nodal.nearSingular());
  auto point = [&](const Crossing& c) {
    return Eigen::Vector3d((1 - c.t) * position(s, c.positive) + c.t * position(s, c.negative));
  };
  const auto& cr = nodal.components[0].crossings;
  for (std::size_t i = 0; i < cr.size(); ++i) {
    const Eigen::Vector3d a = point(cr[i]), b = point(cr[(i + 1) % cr.size()]);
    // With the outward normal, left of the tangent is normal x tangent,
    // which must point to the positive side.
    EXPECT_GT(a.normalized().cross(b - a).dot(axis), 0.0) << i;
  }
}

TEST(NodalSet, OpenArcsOnSurfacesWithBoundary) {
  auto s = buildRoundSphere(3);
  auto cut = removeDisc(s, 0, 0.4);
  // A plane through the removed cap crosses the remaining disc in an arc.
  ASSERT_TRUE(cut.embedding().has_value());
  const Eigen::Vector3d axis = position(s, 0).unitOrthogonal();
  Eigen::VectorXd f(cut.numVertices());
  for (VertexId v = 0; v < cut.numVertices(); ++v) f[v] = position(cut, v).dot(axis) + 1e-3;
  auto nodal = extractNodalSet(cut, f);
  ASSERT_EQ(nodal.components.size(), 1u);
  EXPECT_FALSE(nodal.components[0].closed);
  EXPECT_FALSE(isContractible(cut, nodal, 0));
  const int idx[1] = {0};
  EXPECT_THROW(cutPieces(cut, nodal, idx), std::invalid_argument);
}

TEST(NodalSet, VertexZerosAreFlagged) {
  auto t = buildFlatTorus(8, 8, false);
  Eigen::VectorXd f(64);
  for (int v = 0; v < 64; ++v) f[v] = std::cos(2 * kPi * (v % 8) / 8.0);
  auto rep = analyzeNodalSet(t, f);
  EXPECT_TRUE(rep.nearSingular);
  EXPECT_THROW(countNodalDomains(t, Eigen::VectorXd::Zero(64)), std::invalid_argument);
  EXPECT_THROW(extractNodalSet(t, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST(CutPieces, EulerCharacteristicIsAdditive) {
  // Cutting along closed curves leaves chi unchanged in total.
  const int n = 24;
  auto t = buildFlatTorus(n, n, false);
  auto f = gridFunction(n, [](double x, double y) { return std::sin(2 * kPi * x) + 0.3 * std::cos(2 * kPi * y); });
  auto nodal = extractNodalSet(t, f);
  std::vector<int> all(nodal.components.size());
  std::iota(all.begin(), all.end(), 0);
  auto pieces = cutPieces(t, nodal, all);
  int chi = 0, loops = 0;
  for (const auto& p : pieces) {
    chi += p.eulerCharacteristic;
    loops += p.boundaryLoops;
  }
  EXPECT_EQ(chi, t.eulerCharacteristic());
  EXPECT_EQ(loops, 2 * static_cast<int>(nodal.components.size()));
  EXPECT_EQ(static_cast<int>(pieces.size()), countNodalDomains(t, f));
}

TEST(Containment, RegionTestUsesAdjacentFaces) {
  auto s = buildRoundSphere(3);
  auto f = heightFunction(s, {0, 0, 1});
  auto nodal = extractNodalSet(s, f);
  std::vector<FaceId> all(s.numFaces());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_TRUE(checkContainment(s, nodal, all)[0]);
  std::vector<FaceId> north;
  for (FaceId fi = 0; fi < s.numFaces(); ++fi) {
    bool up = true;
    for (VertexId v : s.faces()[fi]) up = up && position(s, v).z() > 0.0;
    if (up) north.push_back(fi);
  }
  EXPECT_FALSE(checkContainment(s, nodal, north)[0]);
}

TEST(Courant, LowEigenfunctionsRespectTheBound) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto s = perturbMetric(buildRoundSphere(3), 0.05, seed);
    auto pairs = solveLowest(assemble(s), 6);
    EXPECT_EQ(countNodalDomains(s, pairs[1].eigenfunction), 2);
    for (int k = 1; k <= 6; ++k) EXPECT_LE(countNodalDomains(s, pairs[k].eigenfunction), k + 1);
  }
}

TEST(NodalJson, WritesComponents) {
  auto s = buildRoundSphere(2);
  auto f = heightFunction(s, {0, 0.1, 1});
  auto nodal = extractNodalSet(s, f);
  auto rep = analyzeNodalSet(s, f);
  const auto path = std::filesystem::temp_directory_path() / "nc_test_nodal.json";
  writeNodalJson(path, nodal, rep);
  std::ifstream in(path);
  auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["component_count"], 1);
  EXPECT_EQ(j["components"][0]["crossings"].size(), nodal.components[0].crossings.size());
  EXPECT_TRUE(j["components"][0]["contractible"].get<bool>());
  std::filesystem::remove(path);
}
