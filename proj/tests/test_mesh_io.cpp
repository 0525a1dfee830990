#include "nodal_contact/errors.hpp"
#include "nodal_contact/generators.hpp"
#include "nodal_contact/mesh_io.hpp"
#include "nodal_contact/surgery.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace nodal_contact;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nc_mesh_io_test";
  fs::create_directories(dir);
  return dir / name;
}

void expectSameMetric(const DiscreteSurface& a, const DiscreteSurface& b) {
  ASSERT_EQ(a.numVertices(), b.numVertices());
  EXPECT_EQ(a.faces(), b.faces());
  for (EdgeId e = 0; e < a.numEdges(); ++e) {
    const Edge& ed = a.edges()[e];
    EXPECT_EQ(a.edgeLength(e), b.edgeLength(ed.a, ed.b));
  }
}

} // namespace

TEST(SurfaceJson, FieldOrderAndRoundTrip) {
  auto s = perturbMetric(removeDisc(buildRoundSphere(2), 0, 0.5), 0.03, 2);
  const auto path = scratch("disc.json");
  writeSurfaceJson(path, s, {{"all", {0, 1, 2}}});
  std::ifstream in(path);
  auto j = nlohmann::ordered_json::parse(in);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"vertices", "faces", "edge_lengths", "boundary_loops", "embedding",
                                            "regions"}));
  const Edge& e0 = s.edges()[0];
  EXPECT_TRUE(j["edge_lengths"].contains(std::to_string(e0.a) + "-" + std::to_string(e0.b)));

  auto back = readSurfaceJson(path);
  expectSameMetric(s, back.surface);
  EXPECT_EQ(back.surface.boundaryLoops(), s.boundaryLoops());
  EXPECT_EQ(back.surface.fingerprint(), s.fingerprint());
  EXPECT_EQ(back.regions.at("all"), (std::vector<FaceId>{0, 1, 2}));
}

TEST(SurfaceJson, RejectsMissingLengthsAndBadKeys) {
  const auto path = scratch("bad.json");
  {
    std::ofstream out(path);
    out << R"({"vertices":3,"faces":[[0,1,2]],"edge_lengths":{"0-1":1,"1-2":1},"boundary_loops":[[0,1,2]]})";
  }
  EXPECT_THROW(readSurfaceJson(path), GeometryError);
  {
    std::ofstream out(path);
    out << R"({"vertices":3,"faces":[[0,1,2]],"edge_lengths":{"0-1":1,"1-2":1,"x":1},"boundary_loops":[[0,1,2]]})";
  }
  EXPECT_THROW(readSurfaceJson(path), IoError);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  EXPECT_THROW(readSurfaceJson(path), IoError);
}

TEST(Off, EmbeddedRoundTripKeepsMetric) {
  auto s = perturbMetric(buildRoundSphere(1), 0.05, 1);
  const auto path = scratch("sphere.off");
  writeOff(path, s);
  EXPECT_TRUE(fs::exists(lengthsSidecarPath(path)));
  EXPECT_EQ(lengthsSidecarPath(path).filename(), "sphere.lengths.json");
  auto back = readOff(path);
  expectSameMetric(s, back);
  EXPECT_TRUE(back.embedding().has_value());
}

TEST(Off, WithoutSidecarUsesChords) {
  auto s = buildRoundSphere(1);
  const auto path = scratch("chords.off");
  writeOff(path, s);
  fs::remove(lengthsSidecarPath(path));
  auto back = readOff(path);
  for (EdgeId e = 0; e < s.numEdges(); ++e) EXPECT_NEAR(back.edgeLength(e), s.edgeLength(e), 1e-12);
}

TEST(Off, IntrinsicSurfaceNeedsSidecar) {
  auto t = buildFlatTorus(5, 4, false);
  const auto path = scratch("torus.off");
  writeOff(path, t);
  auto back = readOff(path);
  expectSameMetric(t, back);
  EXPECT_FALSE(back.embedding().has_value());
  fs::remove(lengthsSidecarPath(path));
  EXPECT_THROW(readOff(path), IoError);
}
