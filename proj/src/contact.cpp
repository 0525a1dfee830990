#include "nodal_contact/contact.hpp"

#include "nodal_contact/errors.hpp"

#include <Eigen/SparseCholesky>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace nodal_contact {

double InducedContactForm::betaAlong(const DiscreteSurface& surface, VertexId from, VertexId to) const {
  const auto e = surface.edgeId(from, to);
  if (!e) throw std::out_of_range("no edge " + std::to_string(from) + "->" + std::to_string(to));
  return surface.edges()[*e].a == from ? beta[*e] : -beta[*e];
}

InducedContactForm induceContactForm(const DiscreteSurface& surface, const Eigen::VectorXd& f, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("contact constant must be positive");
  if (f.size() != surface.numVertices()) throw std::invalid_argument("function does not belong to this surface");
  const auto w = cotanWeights(surface);
  InducedContactForm form;
  form.lambda = lambda;
  form.f = f;
  form.surfaceRef = surface.fingerprint();
  form.beta.resize(surface.numEdges());
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const Edge& ed = surface.edges()[e];
    form.beta[e] = w[e] * (f[ed.b] - f[ed.a]) / lambda;
  }
  return form;
}

InducedContactForm induceContactForm(const DiscreteSurface& surface, const EigenPair& pair) {
  if (pair.index == 0 || !(pair.eigenvalue > 0.0)) {
    throw std::invalid_argument("contact form needs a positive eigenvalue");
  }
  return induceContactForm(surface, pair.eigenfunction, std::sqrt(pair.eigenvalue));
}

namespace {

// Gradient of the linear interpolant per incident face, rotated into a
// common tangent frame at v, averaged with area weights.
Eigen::Vector2d vertexGradient(const DiscreteSurface& surface, const Eigen::VectorXd& f, VertexId v) {
  struct Corner {
    FaceId face;
    VertexId b, c;
    int corner;
  };
  std::unordered_map<VertexId, Corner> byFirst;
  for (FaceId fi : surface.vertexFaces()[v]) {
    const Face& t = surface.faces()[fi];
    for (int k = 0; k < 3; ++k) {
      if (t[k] == v) byFirst.emplace(t[(k + 1) % 3], Corner{fi, t[(k + 1) % 3], t[(k + 2) % 3], k});
    }
  }
  // On the boundary the fan starts at the face whose first edge is a
  // boundary edge; inside, at the smallest face id.
  const bool boundary = surface.isBoundaryVertex(v);
  const Corner* start = nullptr;
  for (FaceId fi : surface.vertexFaces()[v]) {
    for (const auto& [b, corner] : byFirst) {
      if (corner.face != fi) continue;
      const auto& ef = surface.edgeFaces()[*surface.edgeId(v, b)];
      if (!boundary || ef[1] < 0) start = &corner;
    }
    if (start) break;
  }

  std::vector<std::pair<const Corner*, double>> fan;
  double phi = 0.0;
  for (const Corner* cur = start; cur != nullptr;) {
    fan.emplace_back(cur, phi);
    phi += surface.cornerAngle(cur->face, cur->corner);
    auto it = byFirst.find(cur->c);
    cur = it == byFirst.end() ? nullptr : &it->second;
    if (cur == start) break;
  }
  const double scale = boundary ? 1.0 : 2.0 * std::numbers::pi / phi;

  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  double area = 0.0;
  for (const auto& [corner, angle] : fan) {
    const double lb = surface.edgeLength(v, corner->b);
    const double lc = surface.edgeLength(v, corner->c);
    const double alpha = surface.cornerAngle(corner->face, corner->corner);
    const double d1 = f[corner->b] - f[v], d2 = f[corner->c] - f[v];
    const double px = lc * std::cos(alpha), py = lc * std::sin(alpha);
    const double gx = d1 / lb;
    const double gy = (d2 - px * gx) / py;
    const double rot = scale * angle;
    const double a = surface.faceArea(corner->face);
    sum += a * Eigen::Vector2d(std::cos(rot) * gx - std::sin(rot) * gy, std::sin(rot) * gx + std::cos(rot) * gy);
    area += a;
  }
  return sum / area;
}

} // namespace

ContactConditionReport verifyContactCondition(const DiscreteSurface& surface, const InducedContactForm& form) {
  if (form.f.size() != surface.numVertices()) throw std::invalid_argument("form does not belong to this surface");
  ContactConditionReport report;
  report.q.resize(surface.numVertices());
  for (VertexId v = 0; v < surface.numVertices(); ++v) {
    const Eigen::Vector2d g = vertexGradient(surface, form.f, v);
    report.q[v] = form.f[v] * form.f[v] + g.squaredNorm() / (form.lambda * form.lambda);
  }
  report.argmin = 0;
  report.minQ = report.q[0];
  report.maxQ = report.q[0];
  for (VertexId v = 1; v < surface.numVertices(); ++v) {
    if (report.q[v] < report.minQ) {
      report.minQ = report.q[v];
      report.argmin = v;
    }
    report.maxQ = std::max(report.maxQ, report.q[v]);
  }
  report.positive = report.minQ > kContactThreshold * report.maxQ;
  return report;
}

CurlResiduals verifyCurlEigenform(const DiscreteSurface& surface, const InducedContactForm& form) {
  if (form.f.size() != surface.numVertices() || form.beta.size() != static_cast<std::size_t>(surface.numEdges())) {
    throw std::invalid_argument("form does not belong to this surface");
  }
  const auto w = cotanWeights(surface);
  CurlResiduals out;
  double num = 0.0, den = 0.0;
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const Edge& ed = surface.edges()[e];
    const double starDf = w[e] * (form.f[ed.b] - form.f[ed.a]);
    num += (starDf - form.lambda * form.beta[e]) * (starDf - form.lambda * form.beta[e]);
    den += starDf * starDf;
  }
  out.r1 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);

  // Circulation of beta around each dual cell, oriented so that it equals
  // (S f)_v / lambda.
  Eigen::VectorXd circulation = Eigen::VectorXd::Zero(surface.numVertices());
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const Edge& ed = surface.edges()[e];
    circulation[ed.a] -= form.beta[e];
    circulation[ed.b] += form.beta[e];
  }
  const OperatorPair consistent = assemble(surface, MassKind::Consistent);
  Eigen::SimplicialLDLT<SparseMatrix> solver(consistent.mass);
  if (solver.info() != Eigen::Success) throw SolverError("consistent mass factorization failed", 0.0);
  const Eigen::VectorXd curl = solver.solve(circulation);

  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(surface.numVertices());
  for (FaceId fi = 0; fi < surface.numFaces(); ++fi) {
    for (VertexId v : surface.faces()[fi]) lumped[v] += surface.faceArea(fi) / 3.0;
  }
  const Eigen::VectorXd diff = curl - form.lambda * form.f;
  out.r2 = std::sqrt(diff.cwiseProduct(diff).dot(lumped) / form.f.cwiseProduct(form.f).dot(lumped));
  return out;
}

std::string toString(Tightness t) {
  switch (t) {
    case Tightness::Tight:
      return "Tight";
    case Tightness::Overtwisted:
      return "Overtwisted";
    case Tightness::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

TightnessVerdict classifyTightness(int genus, const NodalReport& report) {
  if (report.componentCount < 1) {
    throw std::invalid_argument("empty dividing set: not a convex surface configuration");
  }
  int contractible = 0;
  for (bool c : report.contractible) contractible += c;
  const std::string counts = "genus " + std::to_string(genus) + ", " + std::to_string(report.componentCount) +
                             " component(s), " + std::to_string(contractible) + " contractible";
  if (report.nearSingular) return {Tightness::Indeterminate, counts + ", near-singular nodal set"};
  if (genus == 0) {
    if (report.componentCount == 1) return {Tightness::Tight, counts + ": a single dividing curve on the sphere"};
    return {Tightness::Overtwisted, counts + ": several dividing curves on the sphere"};
  }
  if (contractible > 0) return {Tightness::Overtwisted, counts + ": a dividing curve bounds a disc"};
  return {Tightness::Tight, counts + ": no dividing curve bounds a disc"};
}

TightnessVerdict classifyTightness(const DiscreteSurface& surface, const NodalReport& report) {
  return classifyTightness(surface.genus(), report);
}

void writeContactForm(const std::filesystem::path& path, const DiscreteSurface& surface,
                      const InducedContactForm& form) {
  nlohmann::ordered_json j;
  j["lambda"] = form.lambda;
  j["f"] = std::vector<double>(form.f.data(), form.f.data() + form.f.size());
  nlohmann::ordered_json beta = nlohmann::ordered_json::object();
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const Edge& ed = surface.edges()[e];
    beta[std::to_string(ed.a) + "->" + std::to_string(ed.b)] = form.beta[e];
  }
  j["beta"] = std::move(beta);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

} // namespace nodal_contact
