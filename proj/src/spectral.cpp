#include "nodal_contact/spectral.hpp"

#include "nodal_contact/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace nodal_contact {

namespace {

constexpr double kMaxCotangent = 1e12;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1), reproducible across standard libraries.
Eigen::VectorXd seededVector(Eigen::Index n, std::uint64_t seed, std::uint64_t stream) {
  Eigen::VectorXd v(n);
  std::uint64_t state = mix64(seed ^ mix64(stream));
  for (Eigen::Index i = 0; i < n; ++i) {
    state = mix64(state);
    v[i] = static_cast<double>(state >> 11) * 0x1.0p-52 - 1.0;
  }
  return v;
}

} // namespace

std::vector<double> cotanWeights(const DiscreteSurface& surface) {
  std::vector<double> w(surface.numEdges(), 0.0);
  for (FaceId f = 0; f < surface.numFaces(); ++f) {
    const auto l = surface.faceLengths(f);
    const double area = triangleArea(l[0], l[1], l[2]);
    for (int c = 0; c < 3; ++c) {
      const double a = l[c], b = l[(c + 1) % 3], d = l[(c + 2) % 3];
      const double cot = (b * b + d * d - a * a) / (4.0 * area);
      if (!std::isfinite(cot) || std::abs(cot) > kMaxCotangent) {
        const Face& t = surface.faces()[f];
        throw GeometryError("degenerate cotangent in face " + std::to_string(f) + " (" +
                            std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                            std::to_string(t[2]) + ")");
      }
      w[surface.faceEdges()[f][c]] += 0.5 * cot;
    }
  }
  return w;
}

OperatorPair assemble(const DiscreteSurface& surface, MassKind mass) {
  const int n = surface.numVertices();
  const auto w = cotanWeights(surface);
  std::vector<Eigen::Triplet<double>> st;
  st.reserve(4 * w.size());
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const Edge& ed = surface.edges()[e];
    st.emplace_back(ed.a, ed.b, -w[e]);
    st.emplace_back(ed.b, ed.a, -w[e]);
    st.emplace_back(ed.a, ed.a, w[e]);
    st.emplace_back(ed.b, ed.b, w[e]);
  }
  std::vector<Eigen::Triplet<double>> mt;
  for (FaceId f = 0; f < surface.numFaces(); ++f) {
    const double area = surface.faceArea(f);
    const Face& t = surface.faces()[f];
    if (mass == MassKind::Lumped) {
      for (VertexId v : t) mt.emplace_back(v, v, area / 3.0);
    } else {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) mt.emplace_back(t[i], t[j], area / (i == j ? 6.0 : 12.0));
      }
    }
  }
  OperatorPair ops;
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(st.begin(), st.end());
  ops.mass.resize(n, n);
  ops.mass.setFromTriplets(mt.begin(), mt.end());
  ops.massKind = mass;
  ops.surfaceRef = surface.fingerprint();
  return ops;
}

double eigenResidual(const OperatorPair& ops, double lambda, const Eigen::VectorXd& f) {
  const Eigen::VectorXd bf = ops.mass * f;
  return (ops.stiffness * f - lambda * bf).norm() / bf.norm();
}

void fixSign(const SparseMatrix& mass, Eigen::VectorXd& f) {
  const double sum = (mass * f).sum();
  if (std::abs(sum) >= 1e-12) {
    if (sum < 0) f = -f;
    return;
  }
  const double scale = f.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > 1e-12 * scale) {
      if (f[i] < 0) f = -f;
      return;
    }
  }
}

namespace {

void finalize(const OperatorPair& ops, std::vector<EigenPair>& pairs) {
  for (auto& p : pairs) {
    p.eigenfunction /= std::sqrt(p.eigenfunction.dot(ops.mass * p.eigenfunction));
    fixSign(ops.mass, p.eigenfunction);
    p.residual = eigenResidual(ops, p.eigenvalue, p.eigenfunction);
  }
}

class BlockKrylov {
public:
  BlockKrylov(const OperatorPair& ops, int nev, const SolverOptions& options)
      : ops_(ops), options_(options), n_(ops.stiffness.rows()), nev_(nev) {
    block_ = std::min<Eigen::Index>(n_, nev + std::max(4, nev / 2));
    capacity_ = std::min<Eigen::Index>(n_, 4 * block_ + 20);
    V_.resize(n_, capacity_);
    factorize(0.01 * ops.stiffness.diagonal().sum() /
              (static_cast<double>(n_) * ops.mass.diagonal().sum()));
  }

  std::vector<EigenPair> run() {
    Eigen::MatrixXd start(n_, block_);
    for (Eigen::Index j = 0; j < block_; ++j) start.col(j) = seededVector(n_, options_.seed, nextStream_++);
    Eigen::Index m = 0;
    Eigen::Index newest = append(start, m);
    double best = std::numeric_limits<double>::infinity();

    for (;;) {
      while (m < n_ && m + block_ <= capacity_) {
        Eigen::MatrixXd W(n_, newest);
        const Eigen::MatrixXd Bw = ops_.mass * V_.middleCols(m - newest, newest);
        for (Eigen::Index j = 0; j < newest; ++j) W.col(j) = factor_.solve(Bw.col(j));
        applications_ += static_cast<int>(newest);
        newest = append(W, m);
        if (newest == 0) break;
      }

      const auto basis = V_.leftCols(m);
      const Eigen::MatrixXd SV = ops_.stiffness * basis;
      Eigen::MatrixXd K = basis.transpose() * SV;
      K = 0.5 * (K + K.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(K);
      const Eigen::Index keep = std::min<Eigen::Index>(m, 2 * block_);
      const Eigen::MatrixXd ritz = basis * rr.eigenvectors().leftCols(keep);

      std::vector<EigenPair> pairs(nev_);
      double worst = 0.0;
      for (int i = 0; i < nev_; ++i) {
        pairs[i].index = i;
        pairs[i].eigenvalue = rr.eigenvalues()[i];
        pairs[i].eigenfunction = ritz.col(i);
        pairs[i].residual = eigenResidual(ops_, pairs[i].eigenvalue, pairs[i].eigenfunction);
        worst = std::max(worst, pairs[i].residual);
      }
      best = std::min(best, worst);
      if (worst <= options_.tol || m == n_) {
        finalize(ops_, pairs);
        return pairs;
      }
      if (applications_ >= options_.maxOperatorApplications) {
        throw SolverError("eigensolver did not converge within " +
                              std::to_string(options_.maxOperatorApplications) + " operator applications",
                          best);
      }
      // Thick restart: keep the leading Ritz vectors and extend from the
      // first block of them.
      m = 0;
      append(ritz, m);
      newest = std::min<Eigen::Index>(block_, m);
      Eigen::MatrixXd W(n_, newest);
      const Eigen::MatrixXd Bw = ops_.mass * V_.leftCols(newest);
      for (Eigen::Index j = 0; j < newest; ++j) W.col(j) = factor_.solve(Bw.col(j));
      applications_ += static_cast<int>(newest);
      newest = append(W, m);
    }
  }

private:
  void factorize(double shift) {
    factor_.compute(SparseMatrix(ops_.stiffness + shift * ops_.mass));
    if (factor_.info() != Eigen::Success) {
      throw SolverError("factorization of the shifted operator failed", std::numeric_limits<double>::infinity());
    }
  }

  // B-orthonormalises the columns of W against the basis (two passes) and
  // appends them; returns the number appended. Dependent columns are
  // replaced by fresh seeded vectors.
  Eigen::Index append(const Eigen::MatrixXd& W, Eigen::Index& m) {
    Eigen::Index added = 0;
    for (Eigen::Index j = 0; j < W.cols() && m < capacity_; ++j) {
      Eigen::VectorXd w = W.col(j);
      for (int attempt = 0;; ++attempt) {
        const double before = std::sqrt(std::max(0.0, w.dot(ops_.mass * w)));
        for (int pass = 0; pass < 2 && m > 0; ++pass) {
          const Eigen::VectorXd h = V_.leftCols(m).transpose() * (ops_.mass * w);
          w -= V_.leftCols(m) * h;
        }
        const double after = std::sqrt(std::max(0.0, w.dot(ops_.mass * w)));
        if (after > 1e-13 * before && after > 0.0) {
          V_.col(m++) = w / after;
          ++added;
          break;
        }
        if (attempt >= 3) break;
        w = seededVector(n_, options_.seed, nextStream_++);
      }
    }
    return added;
  }

  const OperatorPair& ops_;
  SolverOptions options_;
  Eigen::Index n_;
  int nev_;
  Eigen::Index block_ = 0;
  Eigen::Index capacity_ = 0;
  Eigen::MatrixXd V_;
  Eigen::SimplicialLDLT<SparseMatrix> factor_;
  int applications_ = 0;
  std::uint64_t nextStream_ = 0;
};

} // namespace

std::vector<EigenPair> solveLowest(const OperatorPair& ops, int k, const SolverOptions& options) {
  const auto n = ops.stiffness.rows();
  if (k < 0 || k >= n) throw std::invalid_argument("k must satisfy 0 <= k < vertex count");
  if (!(options.tol >= 1e-12 && options.tol <= 1e-4)) {
    throw std::invalid_argument("solver tolerance must lie in [1e-12, 1e-4]");
  }
  BlockKrylov solver(ops, k + 1, options);
  return solver.run();
}

std::vector<EigenPair> denseOracle(const OperatorPair& ops, int k) {
  const auto n = ops.stiffness.rows();
  if (n > 2000) throw std::invalid_argument("dense oracle is limited to 2000 vertices");
  if (k < 0 || k >= n) throw std::invalid_argument("k must satisfy 0 <= k < vertex count");
  const Eigen::MatrixXd S = Eigen::MatrixXd(ops.stiffness);
  const Eigen::MatrixXd B = Eigen::MatrixXd(ops.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, B);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolve failed", std::numeric_limits<double>::infinity());
  std::vector<EigenPair> pairs(k + 1);
  for (int i = 0; i <= k; ++i) {
    pairs[i].index = i;
    pairs[i].eigenvalue = es.eigenvalues()[i];
    pairs[i].eigenfunction = es.eigenvectors().col(i);
  }
  finalize(ops, pairs);
  return pairs;
}

GapReport spectralGapReport(const std::vector<EigenPair>& pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("gap report needs at least two pairs");
  std::vector<const EigenPair*> sorted;
  for (const auto& p : pairs) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->index < b->index; });
  const std::size_t first = sorted.size() >= 3 && sorted.front()->index == 0 ? 1 : 0;
  GapReport report;
  report.minRelativeGap = std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i + 1 < sorted.size(); ++i) {
    const double lo = sorted[i]->eigenvalue, hi = sorted[i + 1]->eigenvalue;
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const double gap = scale > 0.0 ? (hi - lo) / scale : 0.0;
    if (gap < report.minRelativeGap) {
      report.minRelativeGap = gap;
      report.argmin = sorted[i]->index;
    }
  }
  report.simple = report.minRelativeGap > kSimplicityThreshold;
  return report;
}

void writeMatrixMarket(const std::filesystem::path& path, const SparseMatrix& m) {
  std::FILE* out = std::fopen(path.string().c_str(), "w");
  if (!out) throw IoError("cannot write " + path.string());
  std::fprintf(out, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(out, "%ld %ld %ld\n", static_cast<long>(m.rows()), static_cast<long>(m.cols()),
               static_cast<long>(m.nonZeros()));
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      std::fprintf(out, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1), static_cast<long>(it.col() + 1),
                   it.value());
    }
  }
  std::fclose(out);
}

void writeEigenpairs(const std::filesystem::path& path, const std::vector<EigenPair>& pairs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["index"] = p.index;
    j["eigenvalue"] = p.eigenvalue;
    j["residual"] = p.residual;
    j["values"] = std::vector<double>(p.eigenfunction.data(), p.eigenfunction.data() + p.eigenfunction.size());
    arr.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << arr.dump(1) << '\n';
}

std::vector<EigenPair> readEigenpairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<EigenPair> pairs;
  try {
    const auto arr = nlohmann::json::parse(in);
    for (const auto& j : arr) {
      EigenPair p;
      p.index = j.at("index").get<int>();
      p.eigenvalue = j.at("eigenvalue").get<double>();
      p.residual = j.at("residual").get<double>();
      const auto values = j.at("values").get<std::vector<double>>();
      p.eigenfunction = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
      pairs.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed eigenpair file " + path.string() + ": " + e.what());
  }
  return pairs;
}

} // namespace nodal_contact
