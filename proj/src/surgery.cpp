#include "nodal_contact/surgery.hpp"

#include "nodal_contact/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>

namespace nodal_contact {

std::vector<double> dijkstra(const DiscreteSurface& surface, std::span<const VertexId> sources,
                             std::span<const double> initial) {
  if (!initial.empty() && initial.size() != sources.size()) {
    throw std::invalid_argument("dijkstra: one initial distance per source");
  }
  const int n = surface.numVertices();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const double d0 = initial.empty() ? 0.0 : initial[i];
    if (d0 < dist[sources[i]]) {
      dist[sources[i]] = d0;
      heap.emplace(d0, sources[i]);
    }
  }
  const auto& adj = surface.adjacency();
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (VertexId u : adj[v]) {
      const double nd = d + surface.edgeLength(v, u);
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.emplace(nd, u);
      }
    }
  }
  return dist;
}

namespace {

struct SubSurface {
  std::vector<Face> faces;
  std::vector<VertexId> toOriginal;
  std::vector<VertexId> fromOriginal;
};

SubSurface compact(const DiscreteSurface& surface, const std::vector<bool>& keepFace) {
  SubSurface sub;
  std::vector<bool> used(surface.numVertices(), false);
  for (FaceId f = 0; f < surface.numFaces(); ++f) {
    if (!keepFace[f]) continue;
    for (VertexId v : surface.faces()[f]) used[v] = true;
  }
  sub.fromOriginal.assign(surface.numVertices(), -1);
  for (VertexId v = 0; v < surface.numVertices(); ++v) {
    if (!used[v]) continue;
    sub.fromOriginal[v] = static_cast<VertexId>(sub.toOriginal.size());
    sub.toOriginal.push_back(v);
  }
  for (FaceId f = 0; f < surface.numFaces(); ++f) {
    if (!keepFace[f]) continue;
    const Face& t = surface.faces()[f];
    sub.faces.push_back({sub.fromOriginal[t[0]], sub.fromOriginal[t[1]], sub.fromOriginal[t[2]]});
  }
  return sub;
}

DiscreteSurface materialize(const DiscreteSurface& surface, const SubSurface& sub,
                            std::optional<std::vector<BoundaryLoop>> loops) {
  DiscreteSurface::Extras extras;
  extras.boundaryLoops = std::move(loops);
  if (surface.embedding()) {
    std::vector<Vec3> pos;
    pos.reserve(sub.toOriginal.size());
    for (VertexId v : sub.toOriginal) pos.push_back((*surface.embedding())[v]);
    extras.embedding = std::move(pos);
  }
  const auto& map = sub.toOriginal;
  return DiscreteSurface::fromLengths(
      static_cast<int>(map.size()), sub.faces,
      [&](VertexId i, VertexId j) { return surface.edgeLength(map[i], map[j]); }, std::move(extras));
}

BoundaryLoop rotateToStart(const BoundaryLoop& loop, VertexId start) {
  auto it = std::find(loop.begin(), loop.end(), start);
  if (it == loop.end()) throw GeometryError("loop does not contain the requested start vertex");
  BoundaryLoop out(it, loop.end());
  out.insert(out.end(), loop.begin(), it);
  return out;
}

} // namespace

DiscSplit splitDisc(const DiscreteSurface& surface, VertexId center, double radius) {
  if (center < 0 || center >= surface.numVertices()) throw GeometryError("disc centre is not a vertex");
  if (!(radius > 0.0)) throw GeometryError("disc radius must be positive");
  const VertexId sources[1] = {center};
  const auto dist = dijkstra(surface, sources);

  std::vector<bool> inDisc(surface.numFaces(), false);
  bool any = false;
  for (FaceId f = 0; f < surface.numFaces(); ++f) {
    const Face& t = surface.faces()[f];
    if (dist[t[0]] < radius && dist[t[1]] < radius && dist[t[2]] < radius) {
      inDisc[f] = true;
      any = true;
      for (VertexId v : t) {
        if (surface.isBoundaryVertex(v)) throw GeometryError("disc touches an existing boundary");
      }
    }
  }
  if (!any) throw GeometryError("disc radius too small to contain a face");
  std::vector<bool> outside(inDisc.size());
  for (std::size_t f = 0; f < inDisc.size(); ++f) outside[f] = !inDisc[f];
  if (std::none_of(outside.begin(), outside.end(), [](bool b) { return b; })) {
    throw GeometryError("disc covers the whole surface");
  }

  const SubSurface discSub = compact(surface, inDisc);
  const SubSurface restSub = compact(surface, outside);

  DiscSplit out{materialize(surface, restSub, std::nullopt), materialize(surface, discSub, std::nullopt),
                restSub.toOriginal, discSub.toOriginal, restSub.fromOriginal, discSub.fromOriginal, 0};
  const DiscreteSurface& disc = out.disc;
  if (disc.eulerCharacteristic() != 1 || disc.boundaryLoops().size() != 1) {
    throw GeometryError("geodesic ball of radius " + std::to_string(radius) + " is not a disc");
  }
  if (out.remainder.eulerCharacteristic() != surface.eulerCharacteristic() - 1 ||
      out.remainder.boundaryLoops().size() != surface.boundaryLoops().size() + 1) {
    throw GeometryError("disc removal changed the topology of the remainder");
  }

  // Keep the original loops' start vertices; the cut loop starts at its
  // smallest id, which compaction preserves.
  std::vector<BoundaryLoop> loops;
  for (const BoundaryLoop& loop : surface.boundaryLoops()) {
    BoundaryLoop mapped;
    for (VertexId v : loop) mapped.push_back(restSub.fromOriginal[v]);
    loops.push_back(std::move(mapped));
  }
  const BoundaryLoop* cut = nullptr;
  for (const BoundaryLoop& loop : out.remainder.boundaryLoops()) {
    if (!surface.isBoundaryVertex(restSub.toOriginal[loop[0]])) cut = &loop;
  }
  if (cut == nullptr) throw GeometryError("cut loop not found");
  const BoundaryLoop cutLoop = *cut;
  out.cutLoop = static_cast<int>(loops.size());
  loops.push_back(cutLoop);
  out.remainder = materialize(surface, restSub, std::move(loops));

  const VertexId start = discSub.fromOriginal[restSub.toOriginal[cutLoop[0]]];
  out.disc = materialize(surface, discSub,
                         std::vector<BoundaryLoop>{rotateToStart(disc.boundaryLoops()[0], start)});
  return out;
}

DiscreteSurface removeDisc(const DiscreteSurface& surface, VertexId center, double radius) {
  return splitDisc(surface, center, radius).remainder;
}

GluedSurface glueFamily(const GluedFamilySpec& spec) {
  const DiscreteSurface& sphere = spec.spherePart;
  const DiscreteSurface& handle = spec.handlePart;
  if (!(spec.epsilon > 0.0)) throw GeometryError("epsilon must be positive");
  if (sphere.boundaryLoops().size() != 1 || handle.boundaryLoops().size() != 1) {
    throw GeometryError("both parts must have exactly one boundary loop");
  }
  const BoundaryLoop& a = sphere.boundaryLoops()[0];
  const BoundaryLoop& b = handle.boundaryLoops()[0];
  const int N = static_cast<int>(a.size());
  if (static_cast<int>(b.size()) != N) {
    throw GeometryError("boundary loops differ in vertex count: " + std::to_string(N) + " vs " +
                        std::to_string(b.size()));
  }
  const double scale = spec.epsilon / 2.0;

  std::vector<VertexId> handleMap(handle.numVertices(), -1);
  for (int i = 0; i < N; ++i) handleMap[b[(N - i) % N]] = a[i];
  VertexId next = sphere.numVertices();
  for (VertexId v = 0; v < handle.numVertices(); ++v) {
    if (handleMap[v] < 0) handleMap[v] = next++;
  }

  for (int i = 0; i < N; ++i) {
    const double ls = sphere.edgeLength(a[i], a[(i + 1) % N]);
    const double lh = scale * handle.edgeLength(b[(N - i) % N], b[(2 * N - i - 1) % N]);
    if (std::abs(ls - lh) > 1e-9 * std::max(ls, lh)) {
      throw GeometryError("boundary edge " + std::to_string(i) + " length mismatch: sphere " +
                          std::to_string(ls) + ", scaled handle " + std::to_string(lh));
    }
  }

  std::unordered_map<std::uint64_t, double> lengths;
  lengths.reserve(sphere.numEdges() + handle.numEdges());
  for (EdgeId e = 0; e < sphere.numEdges(); ++e) {
    lengths.emplace(edgeKey(sphere.edges()[e].a, sphere.edges()[e].b), sphere.edgeLength(e));
  }
  for (EdgeId e = 0; e < handle.numEdges(); ++e) {
    const Edge& h = handle.edges()[e];
    lengths.emplace(edgeKey(handleMap[h.a], handleMap[h.b]), scale * handle.edgeLength(e));
  }

  std::vector<Face> faces = sphere.faces();
  const FaceId sphereEnd = static_cast<FaceId>(faces.size());
  for (const Face& f : handle.faces()) faces.push_back({handleMap[f[0]], handleMap[f[1]], handleMap[f[2]]});

  DiscreteSurface::Extras extras;
  extras.boundaryLoops = std::vector<BoundaryLoop>{};
  if (sphere.embedding() && handle.embedding()) {
    // Similarity with fixed scale taking the handle loop onto the sphere loop.
    Eigen::MatrixXd P(3, N), Q(3, N);
    for (int i = 0; i < N; ++i) {
      const Vec3& p = (*handle.embedding())[b[(N - i) % N]];
      const Vec3& q = (*sphere.embedding())[a[i]];
      P.col(i) << p[0], p[1], p[2];
      Q.col(i) << q[0], q[1], q[2];
    }
    const Eigen::Vector3d pc = P.rowwise().mean(), qc = Q.rowwise().mean();
    const Eigen::Matrix3d H = (P.colwise() - pc) * (Q.colwise() - qc).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d R = svd.matrixV() * svd.matrixU().transpose();
    std::vector<Vec3> pos = *sphere.embedding();
    pos.resize(next);
    for (VertexId v = 0; v < handle.numVertices(); ++v) {
      if (handleMap[v] < sphere.numVertices()) continue;
      const Vec3& p = (*handle.embedding())[v];
      const Eigen::Vector3d x = qc + scale * R * (Eigen::Vector3d(p[0], p[1], p[2]) - pc);
      pos[handleMap[v]] = {x[0], x[1], x[2]};
    }
    extras.embedding = std::move(pos);
  }
  DiscreteSurface glued = DiscreteSurface::fromLengths(
      next, std::move(faces), [&](VertexId i, VertexId j) { return lengths.at(edgeKey(i, j)); },
      std::move(extras));
  const FaceId total = glued.numFaces();
  return {std::move(glued), {0, sphereEnd}, {sphereEnd, total}, std::move(handleMap)};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

DiscreteSurface perturbMetric(const DiscreteSurface& surface, double amplitude, std::uint64_t seed,
                              std::span<const FaceId> support) {
  if (!(amplitude >= 0.0) || amplitude >= 0.1) {
    throw PerturbationError("perturbation amplitude must lie in [0, 0.1)");
  }
  std::vector<bool> inSupport(surface.numFaces(), false);
  for (FaceId f : support) {
    if (f < 0 || f >= surface.numFaces()) throw GeometryError("support face out of range");
    inSupport[f] = true;
  }
  std::vector<double> lengths(surface.edgeLengths().begin(), surface.edgeLengths().end());
  for (EdgeId e = 0; e < surface.numEdges(); ++e) {
    const auto& ef = surface.edgeFaces()[e];
    if (!inSupport[ef[0]] || (ef[1] >= 0 && !inSupport[ef[1]])) continue;
    const Edge& edge = surface.edges()[e];
    const std::uint64_t h =
        splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(edge.a)) ^
                   (static_cast<std::uint64_t>(edge.b) << 1));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    lengths[e] *= 1.0 + amplitude * (2.0 * u - 1.0);
  }
  try {
    return surface.withEdgeLengths(std::move(lengths));
  } catch (const PerturbationError&) {
    throw;
  } catch (const GeometryError& err) {
    throw PerturbationError(std::string("perturbation produced an invalid metric: ") + err.what());
  }
}

DiscreteSurface perturbMetric(const DiscreteSurface& surface, double amplitude, std::uint64_t seed) {
  std::vector<FaceId> all(surface.numFaces());
  std::iota(all.begin(), all.end(), 0);
  return perturbMetric(surface, amplitude, seed, all);
}

HandleCut cutHandle(const GenusSurface& genus, double radius) {
  const DiscreteSurface& s = genus.surface;
  if (!s.embedding()) throw GeometryError("handle surface needs an embedding to chart the hole");
  DiscSplit split = splitDisc(s, genus.marked, radius);
  const auto& emb = *s.embedding();
  const Vec3 origin = emb[genus.marked];
  auto chart = [&](VertexId original) {
    const Vec3& p = emb[original];
    if (std::abs(p[2] - origin[2]) > 1e-12) throw GeometryError("hole leaves the top face");
    return Vec2{p[0] - origin[0], p[1] - origin[1]};
  };
  HoleTemplate hole;
  const BoundaryLoop& loop = split.remainder.boundaryLoops()[split.cutLoop];
  for (VertexId v : loop) hole.loop.push_back(chart(split.remainderToOriginal[v]));
  for (VertexId original : split.discToOriginal) hole.discPositions.push_back(chart(original));
  hole.discFaces = split.disc.faces();
  for (VertexId v : loop) hole.discLoop.push_back(split.originalToDisc[split.remainderToOriginal[v]]);
  hole.discCenter = split.originalToDisc[genus.marked];
  return {std::move(split.remainder), std::move(hole)};
}

} // namespace nodal_contact
