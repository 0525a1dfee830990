#pragma once

#include "nodal_contact/surface.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nodal_contact {

// Named face subsets travelling with a surface, e.g. "sphere_part".
using RegionMap = std::map<std::string, std::vector<FaceId>>;

struct LoadedSurface {
  DiscreteSurface surface;
  RegionMap regions;
};

// Descriptor fields, in order: vertices, faces, edge_lengths ("i-j" with
// i < j), boundary_loops, then embedding and regions when present.
void writeSurfaceJson(const std::filesystem::path& path, const DiscreteSurface& surface,
                      const RegionMap& regions = {});
LoadedSurface readSurfaceJson(const std::filesystem::path& path);

// path with ".off" replaced by ".lengths.json".
std::filesystem::path lengthsSidecarPath(const std::filesystem::path& offPath);

// OFF with the embedding as coordinates (zeros and an "# intrinsic" comment
// without one), plus the sidecar holding the metric.
void writeOff(const std::filesystem::path& path, const DiscreteSurface& surface);

// Reads the sidecar when it exists; otherwise edge lengths are chords of the
// OFF coordinates.
DiscreteSurface readOff(const std::filesystem::path& path);

} // namespace nodal_contact
