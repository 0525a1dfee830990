#include "nodal_contact/svg.hpp"

#include "nodal_contact/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace nodal_contact {

namespace {

std::string fmt2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string shade(bool positive, double light) {
  // Base tints for the positive and negative nodal domains.
  const double base[2][3] = {{140, 180, 232}, {232, 160, 140}};
  char buf[16];
  const double* c = base[positive ? 1 : 0];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c[0] * light)),
                static_cast<int>(std::lround(c[1] * light)), static_cast<int>(std::lround(c[2] * light)));
  return buf;
}

} // namespace

std::string renderNodalSvg(const DiscreteSurface& surface, const Eigen::VectorXd& f, const SvgOptions& options) {
  if (!surface.embedding()) throw GeometryError("surface has no embedding to draw");
  if (f.size() != surface.numVertices()) throw std::invalid_argument("function size mismatch");
  const auto& emb = *surface.embedding();
  auto pos = [&](VertexId v) { return Eigen::Vector3d(emb[v][0], emb[v][1], emb[v][2]); };

  const Eigen::Vector3d eye = Eigen::Vector3d(options.eye[0], options.eye[1], options.eye[2]).normalized();
  Eigen::Vector3d right = Eigen::Vector3d::UnitZ().cross(eye);
  if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();
  right.normalize();
  const Eigen::Vector3d up = eye.cross(right);

  std::vector<Eigen::Vector2d> screen(surface.numVertices());
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(1e300), hi = Eigen::Vector2d::Constant(-1e300);
  for (VertexId v = 0; v < surface.numVertices(); ++v) {
    const Eigen::Vector3d p = pos(v);
    screen[v] = {p.dot(right), p.dot(up)};
    lo = lo.cwiseMin(screen[v]);
    hi = hi.cwiseMax(screen[v]);
  }
  const double margin = 20.0;
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double scale = std::min(options.width - 2 * margin, options.height - 2 * margin) / span;
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  auto px = [&](const Eigen::Vector2d& s) {
    return fmt2(options.width / 2.0 + scale * (s.x() - mid.x())) + "," +
           fmt2(options.height / 2.0 - scale * (s.y() - mid.y()));
  };

  const double maxAbs = f.cwiseAbs().maxCoeff();
  auto positive = [&](VertexId v) { return f[v] >= -1e-10 * maxAbs; };

  std::vector<FaceId> order(surface.numFaces());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> depth(surface.numFaces());
  for (FaceId fi = 0; fi < surface.numFaces(); ++fi) {
    const Face& t = surface.faces()[fi];
    depth[fi] = (pos(t[0]) + pos(t[1]) + pos(t[2])).dot(eye);
  }
  std::stable_sort(order.begin(), order.end(), [&](FaceId a, FaceId b) { return depth[a] < depth[b]; });

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
         std::to_string(options.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (FaceId fi : order) {
    const Face& t = surface.faces()[fi];
    const Eigen::Vector3d n = (pos(t[1]) - pos(t[0])).cross(pos(t[2]) - pos(t[0]));
    const double light = 0.45 + 0.55 * (n.norm() > 0 ? std::abs(n.normalized().dot(eye)) : 0.0);
    const double mean = f[t[0]] + f[t[1]] + f[t[2]];
    out += "<polygon points=\"" + px(screen[t[0]]) + " " + px(screen[t[1]]) + " " + px(screen[t[2]]) +
           "\" fill=\"" + shade(mean >= 0.0, light) + "\" stroke=\"" + shade(mean >= 0.0, light) + "\" stroke-width=\"0.4\"/>\n";
    // The face's piece of the zero set goes right after the face so nearer
    // faces still cover it.
    std::vector<Eigen::Vector2d> cut;
    for (int c = 0; c < 3; ++c) {
      const VertexId a = t[c], b = t[(c + 1) % 3];
      if (positive(a) == positive(b)) continue;
      const double s = f[a] / (f[a] - f[b]);
      cut.push_back((1 - s) * screen[a] + s * screen[b]);
    }
    if (cut.size() == 2) {
      out += "<line x1=\"" + fmt2(options.width / 2.0 + scale * (cut[0].x() - mid.x())) + "\" y1=\"" +
             fmt2(options.height / 2.0 - scale * (cut[0].y() - mid.y())) + "\" x2=\"" +
             fmt2(options.width / 2.0 + scale * (cut[1].x() - mid.x())) + "\" y2=\"" +
             fmt2(options.height / 2.0 - scale * (cut[1].y() - mid.y())) +
             "\" stroke=\"#000000\" stroke-width=\"1.6\" stroke-linecap=\"round\"/>\n";
    }
  }
  if (!options.title.empty()) {
    out += "<text x=\"10\" y=\"18\" font-family=\"monospace\" font-size=\"13\">" + options.title + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void writeNodalSvg(const std::filesystem::path& path, const DiscreteSurface& surface, const Eigen::VectorXd& f,
                   const SvgOptions& options) {
  const std::string svg = renderNodalSvg(surface, f, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg;
}

} // namespace nodal_contact
