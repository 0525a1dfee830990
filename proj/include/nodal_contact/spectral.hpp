#pragma once

#include "nodal_contact/surface.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nodal_contact {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MassKind { Lumped, Consistent };

// Discrete Laplace-Beltrami operator: stiffness S (cotangent weights) and
// mass B, so that S f = lambda B f approximates Delta f = lambda f with the
// positive Laplacian. Free boundary conditions.
struct OperatorPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
  MassKind massKind = MassKind::Lumped;
  std::string surfaceRef;
};

// Half the sum of the cotangents of the angles opposite each edge.
std::vector<double> cotanWeights(const DiscreteSurface& surface);

OperatorPair assemble(const DiscreteSurface& surface, MassKind mass = MassKind::Lumped);

struct EigenPair {
  int index = 0;
  double eigenvalue = 0.0;
  Eigen::VectorXd eigenfunction;  // B-normalised
  double residual = 0.0;          // |S f - lambda B f| / |B f|
};

struct SolverOptions {
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int maxOperatorApplications = 10000;
};

// The k+1 lowest eigenpairs (indices 0..k) by shift-invert block Krylov
// iteration with thick restarts.
std::vector<EigenPair> solveLowest(const OperatorPair& ops, int k, const SolverOptions& options = {});

// Dense generalized eigensolve; at most 2000 vertices.
std::vector<EigenPair> denseOracle(const OperatorPair& ops, int k);

double eigenResidual(const OperatorPair& ops, double lambda, const Eigen::VectorXd& f);

// Fixes the sign so the B-weighted sum is non-negative, falling back to the
// first entry that is not negligible.
void fixSign(const SparseMatrix& mass, Eigen::VectorXd& f);

struct GapReport {
  double minRelativeGap = 0.0;  // (lambda_{i+1} - lambda_i) / lambda_{i+1}
  int argmin = -1;              // i of the smallest gap
  bool simple = false;
};

inline constexpr double kSimplicityThreshold = 1e-8;

// Gaps between consecutive pairs above index 0 (all pairs when fewer than
// three are given).
GapReport spectralGapReport(const std::vector<EigenPair>& pairs);

void writeMatrixMarket(const std::filesystem::path& path, const SparseMatrix& m);
void writeEigenpairs(const std::filesystem::path& path, const std::vector<EigenPair>& pairs);
std::vector<EigenPair> readEigenpairs(const std::filesystem::path& path);

} // namespace nodal_contact
