#pragma once

#include "nodal_contact/surface.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>

namespace nodal_contact {

struct SvgOptions {
  int width = 640;
  int height = 480;
  Vec3 eye = {0.6, -0.8, 0.9};  // direction from the scene towards the viewer
  std::string title;
};

// Orthographic drawing of the embedded surface, faces tinted by the sign of
// f and the zero set of its linear interpolant drawn on top.
std::string renderNodalSvg(const DiscreteSurface& surface, const Eigen::VectorXd& f, const SvgOptions& options = {});

void writeNodalSvg(const std::filesystem::path& path, const DiscreteSurface& surface, const Eigen::VectorXd& f,
                   const SvgOptions& options = {});

} // namespace nodal_contact
