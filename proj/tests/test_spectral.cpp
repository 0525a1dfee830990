#include "nodal_contact/errors.hpp"
#include "nodal_contact/generators.hpp"
#include "nodal_contact/spectral.hpp"
#include "nodal_contact/surgery.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace nodal_contact;

namespace {

// On the n x n grid torus the cotangent Laplacian is the five-point stencil
// (the diagonal weights vanish) and the lumped mass is h^2, so the spectrum
// is 4 n^2 (sin^2(pi a / n) + sin^2(pi b / n)).
double gridTorusEigenvalue(int n, int a, int b) {
  const double sa = std::sin(std::numbers::pi * a / n), sb = std::sin(std::numbers::pi * b / n);
  return 4.0 * n * n * (sa * sa + sb * sb);
}

} // namespace

TEST(Assemble, StiffnessIsSymmetricWithZeroRowSums) {
  auto s = perturbMetric(buildRoundSphere(2), 0.05, 3);
  auto ops = assemble(s);
  Eigen::MatrixXd S(ops.stiffness);
  EXPECT_LT((S - S.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((S * Eigen::VectorXd::Ones(S.rows())).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(ops.mass.sum(), s.totalArea(), 1e-12);
  EXPECT_EQ(ops.surfaceRef, s.fingerprint());
}

TEST(Assemble, ConsistentMassIntegratesProducts) {
  auto t = buildFlatTorus(6, 6, false);
  auto ops = assemble(t, MassKind::Consistent);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(t.numVertices());
  EXPECT_NEAR(one.dot(ops.mass * one), 1.0, 1e-14);
  Eigen::MatrixXd M(ops.mass);
  EXPECT_NEAR(M(0, 0), 6 * (1.0 / 72) / 6.0, 1e-15);
}

TEST(Assemble, CotanWeightsOnUnitRightTriangles) {
  auto t = buildFlatTorus(4, 4, false);
  auto w = cotanWeights(t);
  for (EdgeId e = 0; e < t.numEdges(); ++e) {
    const double len = t.edgeLength(e) * 4;
    if (std::abs(len - 1.0) < 1e-12) {
      EXPECT_NEAR(w[e], 1.0, 1e-14);
    } else {
      EXPECT_NEAR(w[e], 0.0, 1e-14);
    }
  }
}

TEST(SolveLowest, GridTorusMatchesClosedForm) {
  const int n = 32;
  auto ops = assemble(buildFlatTorus(n, n, false));
  auto pairs = solveLowest(ops, 8);
  ASSERT_EQ(pairs.size(), 9u);
  EXPECT_NEAR(pairs[0].eigenvalue, 0.0, 1e-9);
  const double l1 = gridTorusEigenvalue(n, 1, 0), l2 = gridTorusEigenvalue(n, 1, 1);
  for (int i = 1; i <= 4; ++i) EXPECT_NEAR(pairs[i].eigenvalue / l1, 1.0, 1e-10) << i;
  for (int i = 5; i <= 8; ++i) EXPECT_NEAR(pairs[i].eigenvalue / l2, 1.0, 1e-10) << i;
  for (const auto& p : pairs) EXPECT_LE(p.residual, 1e-9);
}

TEST(SolveLowest, PairsAreMassOrthonormal) {
  auto s = perturbMetric(buildRoundSphere(3), 0.03, 11);
  auto ops = assemble(s);
  auto pairs = solveLowest(ops, 6);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].index, static_cast<int>(i));
    if (i > 0) EXPECT_LE(pairs[i - 1].eigenvalue, pairs[i].eigenvalue);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const double ip = pairs[i].eigenfunction.dot(ops.mass * pairs[j].eigenfunction);
      EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-8);
    }
    const double rq = pairs[i].eigenfunction.dot(ops.stiffness * pairs[i].eigenfunction);
    EXPECT_NEAR(rq, pairs[i].eigenvalue, 1e-9 * std::max(1.0, pairs[i].eigenvalue));
  }
}

TEST(SolveLowest, AgreesWithDenseOracle) {
  const std::vector<DiscreteSurface> surfaces = {perturbMetric(buildRoundSphere(2), 0.05, 5),
                                                 buildFlatTorus(12, 9, false), buildGenusG(1, 2).surface};
  for (const auto& s : surfaces) {
    auto ops = assemble(s);
    auto sparse = solveLowest(ops, 10);
    auto dense = denseOracle(ops, 10);
    for (int i = 1; i <= 10; ++i) {
      EXPECT_LE(std::abs(sparse[i].eigenvalue - dense[i].eigenvalue) / dense[i].eigenvalue, 1e-8) << i;
    }
  }
}

TEST(SolveLowest, RoundSphereApproachesTwo) {
  double previous = 1.0;
  for (int level : {2, 3, 4}) {
    auto pairs = solveLowest(assemble(buildRoundSphere(level)), 3);
    double err = 0.0;
    for (int i = 1; i <= 3; ++i) err = std::max(err, std::abs(pairs[i].eigenvalue - 2.0) / 2.0);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 0.02);
}

TEST(SolveLowest, RejectsBadArguments) {
  auto ops = assemble(buildFlatTorus(4, 4, false));
  EXPECT_THROW(solveLowest(ops, 16), std::invalid_argument);
  EXPECT_THROW(solveLowest(ops, -1), std::invalid_argument);
  EXPECT_THROW(solveLowest(ops, 2, {.tol = 1e-3}), std::invalid_argument);
}

TEST(SolveLowest, IterationCapRaisesWithResidual) {
  auto ops = assemble(buildFlatTorus(40, 40, false));
  try {
    solveLowest(ops, 20, {.tol = 1e-12, .seed = 1, .maxOperatorApplications = 1});
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.bestResidual(), 0.0);
  }
}

TEST(SolveLowest, DeterministicForSeed) {
  auto ops = assemble(perturbMetric(buildRoundSphere(3), 0.02, 2));
  auto a = solveLowest(ops, 4, {.tol = 1e-10, .seed = 7});
  auto b = solveLowest(ops, 4, {.tol = 1e-10, .seed = 7});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].eigenvalue, b[i].eigenvalue);
    EXPECT_EQ(a[i].eigenfunction, b[i].eigenfunction);
  }
}

TEST(GapReport, DetectsMultiplicity) {
  auto torus = solveLowest(assemble(buildFlatTorus(16, 16, false)), 4);
  EXPECT_FALSE(spectralGapReport(torus).simple);
  auto skew = solveLowest(assemble(perturbMetric(buildRoundSphere(2), 0.05, 9)), 4);
  auto gap = spectralGapReport(skew);
  EXPECT_TRUE(gap.simple);
  EXPECT_GT(gap.minRelativeGap, kSimplicityThreshold);
  EXPECT_THROW(spectralGapReport(std::vector<EigenPair>{skew[0]}), std::invalid_argument);
}

TEST(EigenpairIo, RoundTrip) {
  auto pairs = solveLowest(assemble(buildFlatTorus(6, 6, false)), 3);
  const auto path = std::filesystem::temp_directory_path() / "nc_test_pairs.json";
  writeEigenpairs(path, pairs);
  auto back = readEigenpairs(path);
  ASSERT_EQ(back.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(back[i].index, pairs[i].index);
    EXPECT_EQ(back[i].eigenvalue, pairs[i].eigenvalue);
    EXPECT_EQ(back[i].eigenfunction, pairs[i].eigenfunction);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(readEigenpairs(path), IoError);
}

TEST(Residual, FixSignMakesMassSumNonNegative) {
  auto ops = assemble(buildRoundSphere(1));
  auto pairs = denseOracle(ops, 2);
  Eigen::VectorXd f = -pairs[1].eigenfunction;
  fixSign(ops.mass, f);
  EXPECT_GE((ops.mass * f).sum(), -1e-12);
  EXPECT_LT(eigenResidual(ops, pairs[1].eigenvalue, f), 1e-10);
}

TEST(Genericity, PerturbationSplitsTheFirstSphereCluster) {
  auto round = solveLowest(assemble(buildRoundSphere(3)), 3);
  EXPECT_LT((round[3].eigenvalue - round[1].eigenvalue) / round[1].eigenvalue, 1e-9);
  auto bumpy = solveLowest(assemble(perturbMetric(buildRoundSphere(3), 0.02, 4)), 3);
  for (int i = 1; i < 3; ++i) {
    EXPECT_GT((bumpy[i + 1].eigenvalue - bumpy[i].eigenvalue) / bumpy[i + 1].eigenvalue, 1e-6) << i;
  }
}
