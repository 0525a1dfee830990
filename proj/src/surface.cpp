#include "nodal_contact/surface.hpp"

#include "nodal_contact/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

namespace nodal_contact {

namespace {

constexpr double kRelativeAreaThreshold = 1e-12;

std::uint64_t directedKey(VertexId i, VertexId j) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

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

std::string faceName(FaceId f, const Face& face) {
  return "face " + std::to_string(f) + " (" + std::to_string(face[0]) + "," +
         std::to_string(face[1]) + "," + std::to_string(face[2]) + ")";
}

} // namespace

double triangleArea(double a, double b, double c) {
  // Kahan's ordering a >= b >= c.
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  return p <= 0.0 ? 0.0 : 0.25 * std::sqrt(p);
}

double cotOpposite(double a, double b, double c) {
  const double area = triangleArea(a, b, c);
  return (a * a + b * b - c * c) / (4.0 * area);
}

DiscreteSurface DiscreteSurface::fromLengths(int numVertices, std::vector<Face> faces,
                                             const LengthFn& length, Extras extras) {
  if (numVertices <= 0) throw GeometryError("surface needs at least one vertex");
  DiscreteSurface s;
  s.numVertices_ = numVertices;
  s.faces_ = std::move(faces);
  s.embedding_ = std::move(extras.embedding);
  if (s.embedding_ && static_cast<int>(s.embedding_->size()) != numVertices) {
    throw GeometryError("embedding size does not match vertex count");
  }
  const bool requested = extras.boundaryLoops.has_value();
  s.build(requested ? std::move(*extras.boundaryLoops) : std::vector<BoundaryLoop>{}, requested);
  s.lengths_.resize(s.edges_.size());
  for (std::size_t e = 0; e < s.edges_.size(); ++e) {
    s.lengths_[e] = length(s.edges_[e].a, s.edges_[e].b);
  }
  s.validateMetric();
  return s;
}

DiscreteSurface DiscreteSurface::fromEmbedding(std::vector<Vec3> positions, std::vector<Face> faces,
                                               std::optional<std::vector<BoundaryLoop>> loops) {
  const int n = static_cast<int>(positions.size());
  auto chord = [&positions](VertexId i, VertexId j) {
    const Vec3& p = positions[i];
    const Vec3& q = positions[j];
    return std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                     (p[2] - q[2]) * (p[2] - q[2]));
  };
  Extras extras;
  extras.boundaryLoops = std::move(loops);
  extras.embedding = positions;
  return fromLengths(n, std::move(faces), chord, std::move(extras));
}

void DiscreteSurface::build(std::vector<BoundaryLoop> requestedLoops, bool loopsRequested) {
  const int n = numVertices_;
  if (faces_.empty()) throw GeometryError("surface has no faces");

  std::vector<std::uint64_t> keys;
  keys.reserve(faces_.size() * 3);
  std::unordered_set<std::uint64_t> halfEdges;
  halfEdges.reserve(faces_.size() * 3);
  for (FaceId f = 0; f < numFaces(); ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= n) throw GeometryError(faceName(f, t) + " references a missing vertex");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw GeometryError(faceName(f, t) + " repeats a vertex");
    }
    for (int c = 0; c < 3; ++c) {
      const VertexId i = t[c];
      const VertexId j = t[(c + 1) % 3];
      if (!halfEdges.insert(directedKey(i, j)).second) {
        throw GeometryError("half-edge " + std::to_string(i) + "->" + std::to_string(j) +
                            " used twice: non-manifold or inconsistently oriented");
      }
      keys.push_back(edgeKey(i, j));
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  edges_.resize(keys.size());
  edgeIndex_.reserve(keys.size() * 2);
  for (std::size_t e = 0; e < keys.size(); ++e) {
    edges_[e] = {static_cast<VertexId>(keys[e] >> 32), static_cast<VertexId>(keys[e] & 0xffffffffu)};
    edgeIndex_.emplace(keys[e], static_cast<EdgeId>(e));
  }

  faceEdges_.resize(faces_.size());
  edgeFaces_.assign(edges_.size(), {-1, -1});
  vertexFaces_.assign(n, {});
  for (FaceId f = 0; f < numFaces(); ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      const EdgeId e = edgeIndex_.at(edgeKey(t[(c + 1) % 3], t[(c + 2) % 3]));
      faceEdges_[f][c] = e;
      auto& slot = edgeFaces_[e];
      if (slot[0] < 0) {
        slot[0] = f;
      } else if (slot[1] < 0) {
        slot[1] = f;
      } else {
        throw GeometryError("edge shared by more than two faces");
      }
      vertexFaces_[t[c]].push_back(f);
    }
  }

  adjacency_.assign(n, {});
  for (const Edge& e : edges_) {
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  boundaryVertex_.assign(n, false);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edgeFaces_[e][1] < 0) {
      boundaryVertex_[edges_[e].a] = true;
      boundaryVertex_[edges_[e].b] = true;
    }
  }

  // Each vertex must be used, and its incident faces must form one fan.
  for (VertexId v = 0; v < n; ++v) {
    const auto& incident = vertexFaces_[v];
    if (incident.empty()) throw GeometryError("vertex " + std::to_string(v) + " is not used by any face");
    std::unordered_map<FaceId, int> local;
    for (std::size_t k = 0; k < incident.size(); ++k) local.emplace(incident[k], static_cast<int>(k));
    UnionFind fans(static_cast<int>(incident.size()));
    for (VertexId u : adjacency_[v]) {
      const auto& ef = edgeFaces_[edgeIndex_.at(edgeKey(u, v))];
      if (ef[1] >= 0) fans.unite(local.at(ef[0]), local.at(ef[1]));
    }
    for (std::size_t k = 1; k < incident.size(); ++k) {
      if (fans.find(static_cast<int>(k)) != 0) {
        throw GeometryError("vertex " + std::to_string(v) + " is non-manifold (several face fans)");
      }
    }
  }

  UnionFind components(numFaces());
  for (const auto& ef : edgeFaces_) {
    if (ef[1] >= 0) components.unite(ef[0], ef[1]);
  }
  for (FaceId f = 1; f < numFaces(); ++f) {
    if (components.find(f) != 0) throw GeometryError("surface is not connected");
  }

  // Boundary half-edges in the orientation induced by their face.
  std::unordered_map<VertexId, VertexId> next;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edgeFaces_[e][1] >= 0) continue;
    const Face& t = faces_[edgeFaces_[e][0]];
    for (int c = 0; c < 3; ++c) {
      const VertexId i = t[c];
      const VertexId j = t[(c + 1) % 3];
      if (edgeKey(i, j) == edgeKey(edges_[e].a, edges_[e].b)) {
        if (!next.emplace(i, j).second) {
          throw GeometryError("vertex " + std::to_string(i) + " has two outgoing boundary edges");
        }
      }
    }
  }
  std::vector<BoundaryLoop> computed;
  std::vector<VertexId> starts;
  for (const auto& kv : next) starts.push_back(kv.first);
  std::sort(starts.begin(), starts.end());
  std::unordered_set<VertexId> visited;
  for (VertexId s : starts) {
    if (visited.count(s)) continue;
    BoundaryLoop loop;
    VertexId v = s;
    do {
      loop.push_back(v);
      visited.insert(v);
      auto it = next.find(v);
      if (it == next.end()) throw GeometryError("open boundary chain");
      v = it->second;
    } while (v != s);
    computed.push_back(std::move(loop));
  }

  if (loopsRequested) {
    if (requestedLoops.size() != computed.size()) {
      throw GeometryError("boundary loop count does not match the face complex");
    }
    std::vector<bool> matched(computed.size(), false);
    for (const BoundaryLoop& req : requestedLoops) {
      bool ok = false;
      for (std::size_t c = 0; c < computed.size() && !ok; ++c) {
        const BoundaryLoop& cl = computed[c];
        if (matched[c] || cl.size() != req.size() || req.empty()) continue;
        auto pos = std::find(cl.begin(), cl.end(), req[0]);
        if (pos == cl.end()) continue;
        const std::size_t off = static_cast<std::size_t>(pos - cl.begin());
        bool same = true;
        for (std::size_t i = 0; i < req.size() && same; ++i) same = cl[(off + i) % cl.size()] == req[i];
        if (same) {
          matched[c] = true;
          ok = true;
        }
      }
      if (!ok) throw GeometryError("requested boundary loop is not an oriented boundary cycle");
    }
    loops_ = std::move(requestedLoops);
  } else {
    loops_ = std::move(computed);
  }

  const int chi = eulerCharacteristic();
  const int twiceGenus = 2 - chi - static_cast<int>(loops_.size());
  if (twiceGenus < 0 || twiceGenus % 2 != 0) {
    throw GeometryError("Euler characteristic " + std::to_string(chi) + " inconsistent with " +
                        std::to_string(loops_.size()) + " boundary loops");
  }
  genus_ = twiceGenus / 2;
}

void DiscreteSurface::validateMetric() const {
  for (std::size_t e = 0; e < lengths_.size(); ++e) {
    if (!(lengths_[e] > 0.0) || !std::isfinite(lengths_[e])) {
      throw GeometryError("edge " + std::to_string(edges_[e].a) + "-" + std::to_string(edges_[e].b) +
                          " has non-positive length");
    }
  }
  for (FaceId f = 0; f < numFaces(); ++f) {
    const auto l = faceLengths(f);
    for (int c = 0; c < 3; ++c) {
      if (!(l[c] < l[(c + 1) % 3] + l[(c + 2) % 3])) {
        throw GeometryError(faceName(f, faces_[f]) + " violates the triangle inequality");
      }
    }
    const double longest = std::max({l[0], l[1], l[2]});
    if (triangleArea(l[0], l[1], l[2]) <= kRelativeAreaThreshold * longest * longest) {
      throw GeometryError(faceName(f, faces_[f]) + " has (numerically) zero area");
    }
  }
}

double DiscreteSurface::edgeLength(VertexId i, VertexId j) const {
  const auto e = edgeId(i, j);
  if (!e) throw std::out_of_range("no edge " + std::to_string(i) + "-" + std::to_string(j));
  return lengths_[*e];
}

std::optional<EdgeId> DiscreteSurface::edgeId(VertexId i, VertexId j) const {
  auto it = edgeIndex_.find(edgeKey(i, j));
  if (it == edgeIndex_.end()) return std::nullopt;
  return it->second;
}

std::array<double, 3> DiscreteSurface::faceLengths(FaceId f) const {
  const auto& fe = faceEdges_[f];
  return {lengths_[fe[0]], lengths_[fe[1]], lengths_[fe[2]]};
}

double DiscreteSurface::faceArea(FaceId f) const {
  const auto l = faceLengths(f);
  return triangleArea(l[0], l[1], l[2]);
}

double DiscreteSurface::totalArea() const {
  double area = 0.0;
  for (FaceId f = 0; f < numFaces(); ++f) area += faceArea(f);
  return area;
}

double DiscreteSurface::cornerAngle(FaceId f, int c) const {
  const auto l = faceLengths(f);
  const double opposite = l[c];
  const double b = l[(c + 1) % 3];
  const double a = l[(c + 2) % 3];
  const double cosine = std::clamp((a * a + b * b - opposite * opposite) / (2.0 * a * b), -1.0, 1.0);
  return std::acos(cosine);
}

DiscreteSurface DiscreteSurface::withEdgeLengths(std::vector<double> lengths) const {
  if (lengths.size() != lengths_.size()) throw GeometryError("edge length count mismatch");
  DiscreteSurface s = *this;
  s.lengths_ = std::move(lengths);
  s.validateMetric();
  return s;
}

DiscreteSurface DiscreteSurface::withEmbedding(std::optional<std::vector<Vec3>> embedding) const {
  if (embedding && static_cast<int>(embedding->size()) != numVertices_) {
    throw GeometryError("embedding size does not match vertex count");
  }
  DiscreteSurface s = *this;
  s.embedding_ = std::move(embedding);
  return s;
}

std::string DiscreteSurface::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(numVertices_));
  for (const Face& t : faces_) {
    for (VertexId v : t) mix(static_cast<std::uint64_t>(v));
  }
  for (double l : lengths_) mix(std::bit_cast<std::uint64_t>(l));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace nodal_contact
