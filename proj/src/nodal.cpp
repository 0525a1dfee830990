#include "nodal_contact/nodal.hpp"

#include "nodal_contact/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace nodal_contact {

namespace {

struct UnionFind {
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> parent;
};

struct SignedValues {
  std::vector<double> value;  // vertex zeros snapped to 0
  std::vector<bool> positive;
  std::vector<VertexId> zeros;
};

SignedValues classify(const DiscreteSurface& surface, const Eigen::VectorXd& f) {
  if (f.size() != surface.numVertices()) {
    throw std::invalid_argument("function has " + std::to_string(f.size()) + " values for " +
                                std::to_string(surface.numVertices()) + " vertices");
  }
  const double theta = kZeroThreshold * (f.size() > 0 ? f.cwiseAbs().maxCoeff() : 0.0);
  SignedValues s;
  s.value.resize(f.size());
  s.positive.resize(f.size());
  for (Eigen::Index v = 0; v < f.size(); ++v) {
    const bool zero = std::abs(f[v]) < theta || f[v] == 0.0;
    s.value[v] = zero ? 0.0 : f[v];
    s.positive[v] = s.value[v] >= 0.0;
    if (zero) s.zeros.push_back(static_cast<VertexId>(v));
  }
  return s;
}

} // namespace

NodalSet extractNodalSet(const DiscreteSurface& surface, const Eigen::VectorXd& f) {
  const SignedValues sv = classify(surface, f);
  NodalSet nodal;
  nodal.vertexZeros = sv.zeros;

  const int numEdges = surface.numEdges();
  std::vector<EdgeId> next(numEdges, -1), prev(numEdges, -1);
  auto edgeBetween = [&](VertexId a, VertexId b) { return *surface.edgeId(a, b); };
  for (FaceId fi = 0; fi < surface.numFaces(); ++fi) {
    const Face& t = surface.faces()[fi];
    int lone = -1;
    for (int c = 0; c < 3; ++c) {
      if (sv.positive[t[c]] != sv.positive[t[(c + 1) % 3]] && sv.positive[t[c]] != sv.positive[t[(c + 2) % 3]]) {
        lone = c;
      }
    }
    if (lone < 0) continue;
    const VertexId L = t[lone], L1 = t[(lone + 1) % 3], L2 = t[(lone + 2) % 3];
    // Orient each segment with the positive side on the left.
    EdgeId in = edgeBetween(L, L1), out = edgeBetween(L, L2);
    if (!sv.positive[L]) std::swap(in, out);
    next[in] = out;
    prev[out] = in;
  }

  auto crossingOf = [&](EdgeId e) {
    const Edge& ed = surface.edges()[e];
    Crossing c;
    c.edge = e;
    c.positive = sv.positive[ed.a] ? ed.a : ed.b;
    c.negative = sv.positive[ed.a] ? ed.b : ed.a;
    const double fp = sv.value[c.positive], fn = sv.value[c.negative];
    c.t = fp / (fp - fn);
    return c;
  };

  std::vector<bool> visited(numEdges, false);
  for (EdgeId e = 0; e < numEdges; ++e) {
    const Edge& ed = surface.edges()[e];
    if (visited[e] || sv.positive[ed.a] == sv.positive[ed.b]) continue;
    EdgeId start = e;
    bool closed = false;
    for (EdgeId walk = prev[e]; walk >= 0; walk = prev[walk]) {
      if (walk == e) {
        closed = true;
        break;
      }
      start = walk;
    }
    NodalComponent comp;
    comp.closed = closed;
    for (EdgeId walk = start; walk >= 0 && !visited[walk]; walk = next[walk]) {
      visited[walk] = true;
      comp.crossings.push_back(crossingOf(walk));
    }
    nodal.components.push_back(std::move(comp));
  }
  return nodal;
}

int countNodalDomains(const DiscreteSurface& surface, const Eigen::VectorXd& f) {
  if (f.size() != surface.numVertices()) throw std::invalid_argument("function size mismatch");
  if (f.size() == 0 || f.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("nodal domains of the zero function are undefined");
  }
  const SignedValues sv = classify(surface, f);
  UnionFind uf(surface.numVertices());
  for (const Edge& e : surface.edges()) {
    if (sv.positive[e.a] == sv.positive[e.b]) uf.unite(e.a, e.b);
  }
  int count = 0;
  for (VertexId v = 0; v < surface.numVertices(); ++v) count += uf.find(v) == v;
  return count;
}

std::vector<CutPiece> cutPieces(const DiscreteSurface& surface, const NodalSet& nodal,
                                std::span<const int> componentIndices) {
  std::vector<int> cutBy(surface.numEdges(), -1);
  for (int idx : componentIndices) {
    if (idx < 0 || idx >= static_cast<int>(nodal.components.size())) {
      throw std::out_of_range("nodal component index " + std::to_string(idx) + " out of range");
    }
    if (!nodal.components[idx].closed) throw std::invalid_argument("cannot cut along an open nodal arc");
    for (const Crossing& c : nodal.components[idx].crossings) cutBy[c.edge] = idx;
  }

  const int n = surface.numVertices();
  UnionFind uf(n);
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    if (cutBy[e] < 0) uf.unite(surface.edges()[e].a, surface.edges()[e].b);
  }
  std::vector<int> pieceOf(n, -1);
  int pieces = 0;
  for (VertexId v = 0; v < n; ++v) {
    const int root = uf.find(v);
    if (pieceOf[root] < 0) pieceOf[root] = pieces++;
    pieceOf[v] = pieceOf[root];
  }
  std::vector<long> V(pieces, 0), E(pieces, 0), F(pieces, 0);
  std::vector<int> B(pieces, 0);
  for (VertexId v = 0; v < n; ++v) ++V[pieceOf[v]];
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const Edge& ed = surface.edges()[e];
    if (cutBy[e] < 0) {
      ++E[pieceOf[ed.a]];
    } else {
      // The cut point is duplicated and each half of the edge stays on its side.
      for (VertexId side : {ed.a, ed.b}) {
        ++V[pieceOf[side]];
        ++E[pieceOf[side]];
      }
    }
  }
  for (FaceId fi = 0; fi < surface.numFaces(); ++fi) {
    const auto& fe = surface.faceEdges()[fi];
    const bool split = cutBy[fe[0]] >= 0 || cutBy[fe[1]] >= 0 || cutBy[fe[2]] >= 0;
    const Face& t = surface.faces()[fi];
    if (!split) {
      ++F[pieceOf[t[0]]];
      continue;
    }
    // A split face leaves one polygon and one copy of the cut segment on
    // each side.
    for (int c = 0; c < 3; ++c) {
      if (cutBy[fe[c]] < 0) {
        ++F[pieceOf[t[(c + 1) % 3]]];
        ++E[pieceOf[t[(c + 1) % 3]]];
        ++F[pieceOf[t[c]]];
        ++E[pieceOf[t[c]]];
      }
    }
  }
  for (const BoundaryLoop& loop : surface.boundaryLoops()) ++B[pieceOf[loop[0]]];
  for (int idx : componentIndices) {
    const Crossing& c = nodal.components[idx].crossings.front();
    ++B[pieceOf[c.positive]];
    ++B[pieceOf[c.negative]];
  }
  std::vector<CutPiece> out(pieces);
  for (int p = 0; p < pieces; ++p) {
    out[p].eulerCharacteristic = static_cast<int>(V[p] - E[p] + F[p]);
    out[p].boundaryLoops = B[p];
    out[p].genus = (2 - out[p].eulerCharacteristic - B[p]) / 2;
  }
  return out;
}

bool isContractible(const DiscreteSurface& surface, const NodalSet& nodal, int componentIndex) {
  if (componentIndex < 0 || componentIndex >= static_cast<int>(nodal.components.size())) {
    throw std::out_of_range("nodal component index " + std::to_string(componentIndex) + " out of range");
  }
  if (!nodal.components[componentIndex].closed) return false;
  const int idx[1] = {componentIndex};
  const auto pieces = cutPieces(surface, nodal, idx);
  return std::any_of(pieces.begin(), pieces.end(), [](const CutPiece& p) { return p.isDisc(); });
}

std::vector<bool> checkContainment(const DiscreteSurface& surface, const NodalSet& nodal,
                                   std::span<const FaceId> region) {
  std::vector<bool> inRegion(surface.numFaces(), false);
  for (FaceId f : region) inRegion.at(f) = true;
  std::vector<bool> out;
  for (const NodalComponent& comp : nodal.components) {
    bool inside = true;
    for (const Crossing& c : comp.crossings) {
      for (FaceId f : surface.edgeFaces()[c.edge]) {
        if (f >= 0 && !inRegion[f]) inside = false;
      }
    }
    out.push_back(inside);
  }
  return out;
}

NodalReport analyzeNodalSet(const DiscreteSurface& surface, const Eigen::VectorXd& f,
                            std::optional<std::span<const FaceId>> region) {
  const NodalSet nodal = extractNodalSet(surface, f);
  NodalReport report;
  report.componentCount = static_cast<int>(nodal.components.size());
  report.domainCount = countNodalDomains(surface, f);
  for (int i = 0; i < report.componentCount; ++i) report.contractible.push_back(isContractible(surface, nodal, i));
  if (region) report.contained = checkContainment(surface, nodal, *region);
  report.nearSingular = nodal.nearSingular();
  return report;
}

void writeNodalJson(const std::filesystem::path& path, const NodalSet& nodal, const NodalReport& report) {
  nlohmann::ordered_json j;
  j["component_count"] = report.componentCount;
  j["domain_count"] = report.domainCount;
  j["near_singular"] = report.nearSingular;
  j["vertex_zeros"] = nodal.vertexZeros;
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < nodal.components.size(); ++i) {
    const auto& comp = nodal.components[i];
    nlohmann::ordered_json c;
    c["closed"] = comp.closed;
    if (i < report.contractible.size()) c["contractible"] = static_cast<bool>(report.contractible[i]);
    if (report.contained && i < report.contained->size()) c["contained"] = static_cast<bool>((*report.contained)[i]);
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const Crossing& x : comp.crossings) {
      nlohmann::ordered_json p;
      p["edge"] = {x.positive, x.negative};
      p["t"] = x.t;
      pts.push_back(std::move(p));
    }
    c["crossings"] = std::move(pts);
    comps.push_back(std::move(c));
  }
  j["components"] = std::move(comps);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

} // namespace nodal_contact
