#pragma once

#include "nodal_contact/contact.hpp"
#include "nodal_contact/generators.hpp"
#include "nodal_contact/spectral.hpp"
#include "nodal_contact/surgery.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nodal_contact {

// Invalid sweep configuration (bad JSON, unknown keys, broken invariants).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// The reference surface could not be made generic within the retry budget.
class ConstructionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct MeshResolution {
  int handle = 4;  // lattice steps per unit length of the genus-g slab
};

struct SweepConfig {
  int genus = 1;
  std::vector<double> epsilonSchedule = defaultSchedule();
  std::optional<double> epsilon0;  // defaults to the largest schedule entry
  MeshResolution meshResolution;
  int kEigs = 5;
  std::uint64_t seed = 1;
  double perturbationAmplitude = 0.02;
  double tol = 1e-10;

  static std::vector<double> defaultSchedule();  // 1, 1/2, ..., 2^-8
  double effectiveEpsilon0() const;
  void validate() const;
};

SweepConfig sweepConfigFromJson(const nlohmann::json& j);
nlohmann::ordered_json toJson(const SweepConfig& config);
SweepConfig loadSweepConfig(const std::filesystem::path& path);

// Perturbed sphere with a flat disc around the centre vertex, filled at the
// smallest hole scale of the schedule.
struct ReferenceData {
  CappedProfile profile;
  HandleCut handle;
  CappedSphere capped;
  DiscreteSurface surface;
  std::vector<EigenPair> pairs;  // indices 0..kEigs
  GapReport gap;
  std::uint64_t seedUsed = 0;
  int attempts = 0;
  double margin = 0.0;  // geodesic distance from the centre to the first nodal line
  int domainCount = 0;
};

ReferenceData runReference(const SweepConfig& config);

// One member M_epsilon of the glued family: the sphere part with hole scale
// epsilon/2, perturbed outside its flat disc with sphereSeed, glued to the
// handle scaled by epsilon/2 and perturbed on the handle with handleSeed.
struct GluedMember {
  CappedSphere part;
  DiscreteSurface spherePart;
  GluedSurface glued;  // unperturbed handle
  DiscreteSurface surface;
};

GluedMember buildGluedMember(const CappedProfile& profile, const HandleCut& handle, double epsilon, double amplitude,
                             std::uint64_t sphereSeed, std::uint64_t handleSeed);

struct ModeRecord {
  int k = 0;
  double lambda = 0.0;
  double absErr = 0.0;
  int components = 0;
  int contractibleComponents = 0;
  bool contractible = false;  // every component bounds a disc
  bool contained = false;     // every component lies in the sphere part minus the epsilon0 disc
  Tightness verdict = Tightness::Indeterminate;
};

struct EpsilonRecord {
  double epsilon = 0.0;
  bool failed = false;
  std::vector<std::string> flags;
  int vertices = 0;
  int genus = 0;
  std::uint64_t handleSeed = 0;
  std::vector<ModeRecord> modes;  // k = 1..kEigs, empty when failed
  bool signChange = false;        // f1 changes sign on the sphere part
  double eigenfunctionDeviation = 0.0;
  // Kept for plotting; not serialized.
  std::shared_ptr<const DiscreteSurface> surface;
  Eigen::VectorXd firstEigenfunction;
};

struct SweepReport {
  SweepConfig config;
  std::vector<double> referenceEigenvalues;  // indices 0..kEigs
  double referenceMargin = 0.0;
  std::uint64_t referenceSeed = 0;
  std::vector<EpsilonRecord> perEpsilon;
  std::optional<int> containmentFrom;  // first index after which containment always holds
  bool finalVerdict = false;
  std::string finalReason;
};

// Workers default to the hardware concurrency, capped by NODAL_CONTACT_THREADS.
int workerCount();

SweepReport runEpsilonSweep(const SweepConfig& config, const ReferenceData& reference);
SweepReport runEpsilonSweep(const SweepConfig& config);

nlohmann::ordered_json toJson(const SweepReport& report);

// Writes report.csv, report.json, summary.txt and nodal_eps_<i>.svg. Returns
// the written paths in order.
std::vector<std::filesystem::path> emitReport(const SweepReport& report, const std::filesystem::path& outDir);

} // namespace nodal_contact
