#include "nodal_contact/mesh_io.hpp"

#include "nodal_contact/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace nodal_contact {

namespace {

std::string edgeName(const Edge& e) { return std::to_string(e.a) + "-" + std::to_string(e.b); }

nlohmann::ordered_json lengthsJson(const DiscreteSurface& s) {
  nlohmann::ordered_json lengths = nlohmann::ordered_json::object();
  for (EdgeId e = 0; e < s.numEdges(); ++e) lengths[edgeName(s.edges()[e])] = s.edgeLength(e);
  return lengths;
}

std::unordered_map<std::uint64_t, double> parseLengths(const nlohmann::json& j, int numVertices) {
  if (!j.is_object()) throw IoError("edge_lengths must be an object");
  std::unordered_map<std::uint64_t, double> out;
  for (const auto& [key, value] : j.items()) {
    const auto dash = key.find('-');
    int a = -1, b = -1;
    try {
      if (dash == std::string::npos) throw std::invalid_argument(key);
      std::size_t used = 0;
      a = std::stoi(key.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument(key);
      b = std::stoi(key.substr(dash + 1), &used);
      if (used != key.size() - dash - 1) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw IoError("bad edge key '" + key + "'");
    }
    if (a < 0 || b < 0 || a >= numVertices || b >= numVertices || a == b) {
      throw IoError("edge key '" + key + "' out of range");
    }
    if (!value.is_number()) throw IoError("edge length for '" + key + "' is not a number");
    out[edgeKey(a, b)] = value.get<double>();
  }
  return out;
}

DiscreteSurface::LengthFn lookup(const std::unordered_map<std::uint64_t, double>& lengths) {
  return [&lengths](VertexId i, VertexId j) {
    const auto it = lengths.find(edgeKey(i, j));
    if (it == lengths.end()) {
      throw GeometryError("missing edge length for " + std::to_string(std::min(i, j)) + "-" +
                          std::to_string(std::max(i, j)));
    }
    return it->second;
  };
}

nlohmann::json parseFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

} // namespace

void writeSurfaceJson(const std::filesystem::path& path, const DiscreteSurface& surface, const RegionMap& regions) {
  nlohmann::ordered_json j;
  j["vertices"] = surface.numVertices();
  j["faces"] = surface.faces();
  j["edge_lengths"] = lengthsJson(surface);
  j["boundary_loops"] = surface.boundaryLoops();
  if (surface.embedding()) j["embedding"] = *surface.embedding();
  if (!regions.empty()) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& [name, faces] : regions) r[name] = faces;
    j["regions"] = std::move(r);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump() << '\n';
}

LoadedSurface readSurfaceJson(const std::filesystem::path& path) {
  const nlohmann::json j = parseFile(path);
  try {
    const int n = j.at("vertices").get<int>();
    auto faces = j.at("faces").get<std::vector<Face>>();
    const auto lengths = parseLengths(j.at("edge_lengths"), n);
    DiscreteSurface::Extras extras;
    extras.boundaryLoops = j.at("boundary_loops").get<std::vector<BoundaryLoop>>();
    if (j.contains("embedding")) extras.embedding = j["embedding"].get<std::vector<Vec3>>();
    DiscreteSurface surface = DiscreteSurface::fromLengths(n, std::move(faces), lookup(lengths), std::move(extras));
    if (static_cast<int>(lengths.size()) != surface.numEdges()) {
      throw GeometryError("edge_lengths has entries that are not edges of the surface");
    }
    RegionMap regions;
    if (j.contains("regions")) {
      for (const auto& [name, faceList] : j["regions"].items()) {
        auto ids = faceList.get<std::vector<FaceId>>();
        for (FaceId f : ids) {
          if (f < 0 || f >= surface.numFaces()) throw GeometryError("region '" + name + "' has a bad face id");
        }
        regions[name] = std::move(ids);
      }
    }
    return {std::move(surface), std::move(regions)};
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad surface descriptor " + path.string() + ": " + e.what());
  }
}

std::filesystem::path lengthsSidecarPath(const std::filesystem::path& offPath) {
  std::filesystem::path p = offPath;
  p.replace_extension(".lengths.json");
  return p;
}

void writeOff(const std::filesystem::path& path, const DiscreteSurface& surface) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "OFF\n";
  if (!surface.embedding()) out << "# intrinsic\n";
  out << surface.numVertices() << ' ' << surface.numFaces() << " 0\n";
  char buf[96];
  for (VertexId v = 0; v < surface.numVertices(); ++v) {
    const Vec3 p = surface.embedding() ? (*surface.embedding())[v] : Vec3{0, 0, 0};
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  for (const Face& f : surface.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';

  std::ofstream side(lengthsSidecarPath(path), std::ios::binary);
  if (!side) throw IoError("cannot write " + lengthsSidecarPath(path).string());
  side << lengthsJson(surface).dump() << '\n';
}

DiscreteSurface readOff(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> tokens;
  bool intrinsic = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      if (line.find("intrinsic", hash) != std::string::npos) intrinsic = true;
      line.resize(hash);
    }
    std::istringstream ls(line);
    for (std::string t; ls >> t;) tokens.push_back(t);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw IoError("truncated OFF file " + path.string());
    return tokens[pos++];
  };
  if (next() != "OFF") throw IoError(path.string() + " is not an OFF file");
  int nv = 0, nf = 0;
  try {
    nv = std::stoi(next());
    nf = std::stoi(next());
    next();
    std::vector<Vec3> pts(nv);
    for (auto& p : pts) {
      for (double& c : p) c = std::stod(next());
    }
    std::vector<Face> faces(nf);
    for (auto& f : faces) {
      if (std::stoi(next()) != 3) throw IoError("only triangular faces are supported");
      for (int& v : f) v = std::stoi(next());
    }
    const auto sidecar = lengthsSidecarPath(path);
    if (std::filesystem::exists(sidecar)) {
      const auto lengths = parseLengths(parseFile(sidecar), nv);
      DiscreteSurface::Extras extras;
      if (!intrinsic) extras.embedding = std::move(pts);
      return DiscreteSurface::fromLengths(nv, std::move(faces), lookup(lengths), std::move(extras));
    }
    if (intrinsic) throw IoError("intrinsic OFF file " + path.string() + " has no lengths sidecar");
    return DiscreteSurface::fromEmbedding(std::move(pts), std::move(faces));
  } catch (const std::invalid_argument&) {
    throw IoError("bad number in OFF file " + path.string());
  } catch (const std::out_of_range&) {
    throw IoError("number out of range in OFF file " + path.string());
  }
}

} // namespace nodal_contact
