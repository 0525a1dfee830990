#include "nodal_contact/generators.hpp"

#include "nodal_contact/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>

namespace nodal_contact {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 normalized(const Vec3& p) {
  const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {p[0] / n, p[1] / n, p[2] / n};
}

double smoothstep(double lo, double hi, double x) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double t = (x - lo) / (hi - lo);
  return t * t * (3.0 - 2.0 * t);
}

} // namespace

DiscreteSurface buildRoundSphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 8) {
    throw GeometryError("sphere subdivisions must lie in [0, 8], got " + std::to_string(subdivisions));
  }
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pts) p = normalized(p);
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::unordered_map<std::uint64_t, VertexId> midpoint;
    auto mid = [&](VertexId a, VertexId b) {
      const auto key = edgeKey(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3& p = pts[a];
      const Vec3& q = pts[b];
      pts.push_back(normalized({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
      const VertexId id = static_cast<VertexId>(pts.size() - 1);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const VertexId ab = mid(f[0], f[1]);
      const VertexId bc = mid(f[1], f[2]);
      const VertexId ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  return DiscreteSurface::fromEmbedding(std::move(pts), std::move(faces));
}

DiscreteSurface buildFlatTorus(int n, int m, bool embed) {
  if (n < 3 || m < 3) throw GeometryError("flat torus needs n, m >= 3");
  auto id = [n, m](int i, int j) { return ((i % n + n) % n) + n * ((j % m + m) % m); };
  std::vector<Face> faces;
  faces.reserve(2 * static_cast<std::size_t>(n) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      const VertexId v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
      faces.push_back({v00, v10, v11});
      faces.push_back({v00, v11, v01});
    }
  }
  auto wrapped = [](int d, int period) {
    d = ((d % period) + period) % period;
    return d > period / 2 ? d - period : d;
  };
  auto length = [=](VertexId a, VertexId b) {
    const double dx = static_cast<double>(wrapped(b % n - a % n, n)) / n;
    const double dy = static_cast<double>(wrapped(b / n - a / n, m)) / m;
    return std::sqrt(dx * dx + dy * dy);
  };
  DiscreteSurface::Extras extras;
  if (embed) {
    std::vector<Vec3> pos(static_cast<std::size_t>(n) * m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) {
        const double u = 2.0 * kPi * i / n;
        const double v = 2.0 * kPi * j / m;
        const double r = 1.0 + 0.4 * std::cos(v);
        pos[id(i, j)] = {r * std::cos(u), r * std::sin(u), 0.4 * std::sin(v)};
      }
    }
    extras.embedding = std::move(pos);
  }
  return DiscreteSurface::fromLengths(n * m, std::move(faces), length, std::move(extras));
}

GenusSurface buildGenusG(int g, int resolution) {
  if (g < 1) throw GeometryError("genus must be at least 1");
  if (resolution < 2) throw GeometryError("slab resolution must be at least 2 to carry the holes");
  const int r = resolution;
  const int nx = (4 + 2 * g) * r, ny = 4 * r, nz = r;
  const double h = 1.0 / r;

  auto occupied = [&](int ix, int iy, int iz) {
    if (ix < 0 || iy < 0 || iz < 0 || ix >= nx || iy >= ny || iz >= nz) return false;
    if (iy >= r && iy < 3 * r && ix >= 4 * r) {
      const int rel = ix - 4 * r;
      if ((rel / r) % 2 == 0) return false;  // x in [4+2i, 5+2i]
    }
    return true;
  };

  std::map<std::array<int, 3>, VertexId> index;
  std::vector<Vec3> pos;
  std::vector<Face> faces;
  auto vertex = [&](const std::array<int, 3>& p) {
    auto [it, inserted] = index.emplace(p, static_cast<VertexId>(pos.size()));
    if (inserted) pos.push_back({p[0] * h, p[1] * h, p[2] * h});
    return it->second;
  };

  struct Direction {
    int axis;
    int sign;
  };
  const Direction dirs[6] = {{0, 1}, {0, -1}, {1, 1}, {1, -1}, {2, 1}, {2, -1}};
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        if (!occupied(ix, iy, iz)) continue;
        for (const Direction& d : dirs) {
          std::array<int, 3> nb = {ix, iy, iz};
          nb[d.axis] += d.sign;
          if (occupied(nb[0], nb[1], nb[2])) continue;
          // Tangent axes (u, v) with u x v along the outward normal.
          int u = (d.axis + 1) % 3, v = (d.axis + 2) % 3;
          if (d.sign < 0) std::swap(u, v);
          std::array<int, 3> base = {ix, iy, iz};
          if (d.sign > 0) base[d.axis] += 1;
          std::array<VertexId, 4> c;
          const int du[4] = {0, 1, 1, 0};
          const int dv[4] = {0, 0, 1, 1};
          for (int k = 0; k < 4; ++k) {
            std::array<int, 3> p = base;
            p[u] += du[k];
            p[v] += dv[k];
            c[k] = vertex(p);
          }
          faces.push_back({c[0], c[1], c[2]});
          faces.push_back({c[0], c[2], c[3]});
        }
      }
    }
  }
  const VertexId marked = index.at({2 * r, 2 * r, r});
  return {DiscreteSurface::fromEmbedding(std::move(pos), std::move(faces)), marked};
}

double CappedProfile::sphereRadius() const { return rimRadius + flatRadius / std::sin(rimAngle); }

double CappedProfile::length() const {
  const double R = sphereRadius();
  return flatRadius + rimRadius * rimAngle + R * (kPi / 2 - rimAngle) + cylinderLength + R * kPi / 2;
}

Vec2 CappedProfile::at(double s) const {
  const double a = flatRadius, rho = rimRadius, th = rimAngle, R = sphereRadius();
  if (s <= a) return {s, 0.0};
  const double s1 = a + rho * th;
  if (s <= s1) {
    const double phi = (s - a) / rho;
    return {a + rho * std::sin(phi), -rho * (1.0 - std::cos(phi))};
  }
  const double zc = -rho * (1.0 - std::cos(th)) - R * std::cos(th);
  const double s2 = s1 + R * (kPi / 2 - th);
  if (s <= s2) {
    const double psi = th + (s - s1) / R;
    return {R * std::sin(psi), zc + R * std::cos(psi)};
  }
  const double s3 = s2 + cylinderLength;
  if (s <= s3) return {R, zc - (s - s2)};
  const double psi = std::min(kPi, kPi / 2 + (s - s3) / R);
  return {R * std::sin(psi), zc - cylinderLength + R * std::cos(psi)};
}

CappedSphere buildCappedSphere(const CappedProfile& profile, const HoleTemplate& hole,
                               double holeScale, bool fill) {
  const int N = static_cast<int>(hole.loop.size());
  if (N < 3) throw GeometryError("hole loop needs at least 3 vertices");
  const double a = profile.flatRadius;
  if (!(profile.morphBegin < profile.morphEnd && profile.morphEnd <= a)) {
    throw GeometryError("morph band must satisfy morphBegin < morphEnd <= flatRadius");
  }
  if (!(holeScale > 0.0) || holeScale > profile.morphBegin) {
    throw GeometryError("hole scale must lie in (0, morphBegin]");
  }
  std::vector<Vec2> shape(N), unit(N);
  double maxNorm = 0.0;
  for (int j = 0; j < N; ++j) {
    shape[j] = {hole.loop[j][0], -hole.loop[j][1]};
    const double norm = std::hypot(shape[j][0], shape[j][1]);
    if (!(norm > 0.0)) throw GeometryError("hole loop passes through its centre");
    unit[j] = {shape[j][0] / norm, shape[j][1] / norm};
    maxNorm = std::max(maxNorm, norm);
  }
  if (holeScale * maxNorm >= a) throw GeometryError("hole does not fit inside the flat disc");

  std::vector<Vec3> pos;
  std::vector<Face> faces;
  using Ring = std::vector<VertexId>;
  auto strip = [&faces, N](const Ring& in, const Ring& out) {
    for (int j = 0; j < N; ++j) {
      const int k = (j + 1) % N;
      faces.push_back({in[j], out[j], out[k]});
      faces.push_back({in[j], out[k], in[k]});
    }
  };

  // Outer part: rings by arc length from the flat radius to the far pole.
  const double total = profile.length();
  const double step = profile.outerStep > 0.0 ? profile.outerStep : 2.0 * kPi * a / N;
  const int outerRings = std::max(2, static_cast<int>(std::lround((total - a) / step)));
  std::vector<Ring> outer;
  for (int k = 0; k < outerRings; ++k) {
    const double s = a + (total - a) * k / outerRings;
    const Vec2 rz = profile.at(s);
    Ring ring(N);
    for (int j = 0; j < N; ++j) {
      ring[j] = static_cast<VertexId>(pos.size());
      pos.push_back({rz[0] * unit[j][0], rz[0] * unit[j][1], rz[1]});
    }
    outer.push_back(std::move(ring));
  }
  const VertexId pole = static_cast<VertexId>(pos.size());
  pos.push_back({0.0, 0.0, profile.at(total)[1]});
  for (int k = 0; k + 1 < outerRings; ++k) strip(outer[k], outer[k + 1]);
  for (int j = 0; j < N; ++j) faces.push_back({outer.back()[j], pole, outer.back()[(j + 1) % N]});

  const FaceId flatFaceBegin = static_cast<FaceId>(faces.size());

  // Flat rings shrink by q per step, which keeps triangles near equilateral.
  auto ringPoint = [&](double sigma, int j) {
    const double w = smoothstep(profile.morphBegin, profile.morphEnd, sigma);
    return Vec3{sigma * ((1.0 - w) * shape[j][0] + w * unit[j][0]),
                sigma * ((1.0 - w) * shape[j][1] + w * unit[j][1]), 0.0};
  };
  const double q = 1.0 + 2.0 * kPi / N;
  Ring previous = outer.front();
  for (int k = 1;; ++k) {
    const double sigma = a * std::pow(q, -k);
    if (sigma < holeScale * std::sqrt(q)) break;
    Ring ring(N);
    for (int j = 0; j < N; ++j) {
      ring[j] = static_cast<VertexId>(pos.size());
      pos.push_back(ringPoint(sigma, j));
    }
    strip(ring, previous);
    previous = std::move(ring);
  }
  const int stableVertexCount = static_cast<int>(pos.size());

  Ring holeRing(N);
  for (int j = 0; j < N; ++j) {
    holeRing[j] = static_cast<VertexId>(pos.size());
    pos.push_back({holeScale * shape[j][0], holeScale * shape[j][1], 0.0});
  }
  strip(holeRing, previous);

  std::optional<std::vector<BoundaryLoop>> loops;
  std::optional<VertexId> center;
  if (fill) {
    if (hole.discLoop.size() != static_cast<std::size_t>(N) || hole.discCenter < 0) {
      throw GeometryError("hole template has no matching disc");
    }
    std::vector<VertexId> map(hole.discPositions.size(), -1);
    for (int j = 0; j < N; ++j) map[hole.discLoop[j]] = holeRing[j];
    for (std::size_t d = 0; d < map.size(); ++d) {
      if (map[d] >= 0) continue;
      map[d] = static_cast<VertexId>(pos.size());
      pos.push_back({holeScale * hole.discPositions[d][0], -holeScale * hole.discPositions[d][1], 0.0});
    }
    // Mirroring reverses orientation, so each face is reversed.
    for (const Face& f : hole.discFaces) faces.push_back({map[f[0]], map[f[2]], map[f[1]]});
    center = map[hole.discCenter];
  } else {
    BoundaryLoop loop(N);
    for (int i = 0; i < N; ++i) loop[i] = holeRing[(N - i) % N];
    loops = std::vector<BoundaryLoop>{std::move(loop)};
  }
  return {DiscreteSurface::fromEmbedding(std::move(pos), std::move(faces), std::move(loops)),
          center, stableVertexCount, flatFaceBegin, holeScale, std::move(holeRing)};
}

} // namespace nodal_contact
