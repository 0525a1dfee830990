#include "nodal_contact/experiments.hpp"

#include "nodal_contact/errors.hpp"
#include "nodal_contact/nodal.hpp"
#include "nodal_contact/svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <thread>

namespace nodal_contact {

namespace {

constexpr int kMaxAttempts = 10;
constexpr double kHandleRadius = 1.0;

std::vector<FaceId> faceRange(FaceId begin, FaceId end) {
  std::vector<FaceId> out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

std::string formatDouble(double x, const char* spec = "%.12g") {
  if (!std::isfinite(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

template <class T>
T require(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

} // namespace

std::vector<double> SweepConfig::defaultSchedule() {
  std::vector<double> out;
  for (int i = 0; i <= 8; ++i) out.push_back(std::ldexp(1.0, -i));
  return out;
}

double SweepConfig::effectiveEpsilon0() const {
  if (epsilon0) return *epsilon0;
  return epsilonSchedule.empty() ? 0.0 : *std::max_element(epsilonSchedule.begin(), epsilonSchedule.end());
}

void SweepConfig::validate() const {
  if (genus < 1) throw ConfigError("genus must be at least 1");
  if (epsilonSchedule.empty()) throw ConfigError("epsilon_schedule must not be empty");
  for (std::size_t i = 0; i < epsilonSchedule.size(); ++i) {
    if (!(epsilonSchedule[i] > 0.0) || !std::isfinite(epsilonSchedule[i])) {
      throw ConfigError("epsilon_schedule entries must be positive");
    }
    if (i > 0 && !(epsilonSchedule[i] < epsilonSchedule[i - 1])) {
      throw ConfigError("epsilon_schedule must be strictly decreasing");
    }
  }
  if (epsilon0 && !(*epsilon0 >= epsilonSchedule.front())) {
    throw ConfigError("epsilon0 must be at least the largest schedule entry");
  }
  if (meshResolution.handle < 2 || meshResolution.handle > 16) {
    throw ConfigError("mesh_resolution.handle must lie in [2, 16]");
  }
  if (kEigs < 1 || kEigs > 20) throw ConfigError("k_eigs must lie in [1, 20]");
  if (!(perturbationAmplitude >= 0.0 && perturbationAmplitude < 0.1)) {
    throw ConfigError("perturbation_amplitude must lie in [0, 0.1)");
  }
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw ConfigError("tol must lie in [1e-12, 1e-4]");
}

SweepConfig sweepConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"genus", "epsilon_schedule", "epsilon0", "mesh_resolution",
                                                 "k_eigs", "seed", "perturbation_amplitude", "tol"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config field '" + key + "'");
  }
  SweepConfig c;
  if (j.contains("genus")) c.genus = require<int>(j, "genus");
  if (j.contains("epsilon_schedule")) c.epsilonSchedule = require<std::vector<double>>(j, "epsilon_schedule");
  if (j.contains("epsilon0") && !j["epsilon0"].is_null()) c.epsilon0 = require<double>(j, "epsilon0");
  if (j.contains("mesh_resolution")) {
    const auto& m = j["mesh_resolution"];
    if (!m.is_object()) throw ConfigError("mesh_resolution must be an object");
    for (const auto& [key, value] : m.items()) {
      if (key != "handle") throw ConfigError("unknown mesh_resolution field '" + key + "'");
    }
    if (m.contains("handle")) c.meshResolution.handle = require<int>(m, "handle");
  }
  if (j.contains("k_eigs")) c.kEigs = require<int>(j, "k_eigs");
  if (j.contains("seed")) c.seed = require<std::uint64_t>(j, "seed");
  if (j.contains("perturbation_amplitude")) c.perturbationAmplitude = require<double>(j, "perturbation_amplitude");
  if (j.contains("tol")) c.tol = require<double>(j, "tol");
  c.validate();
  return c;
}

nlohmann::ordered_json toJson(const SweepConfig& c) {
  nlohmann::ordered_json j;
  j["genus"] = c.genus;
  j["epsilon_schedule"] = c.epsilonSchedule;
  j["epsilon0"] = c.effectiveEpsilon0();
  j["mesh_resolution"] = {{"handle", c.meshResolution.handle}};
  j["k_eigs"] = c.kEigs;
  j["seed"] = c.seed;
  j["perturbation_amplitude"] = c.perturbationAmplitude;
  j["tol"] = c.tol;
  return j;
}

SweepConfig loadSweepConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return sweepConfigFromJson(j);
}

namespace {

// Smallest geodesic distance from the source distances to the zero set of
// the interpolant of f.
double nodalDistance(const NodalSet& nodal, const std::vector<double>& dist) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& comp : nodal.components) {
    for (const Crossing& c : comp.crossings) {
      d = std::min(d, (1 - c.t) * dist[c.positive] + c.t * dist[c.negative]);
    }
  }
  return d;
}

} // namespace

ReferenceData runReference(const SweepConfig& config) {
  config.validate();
  const CappedProfile profile;
  const GenusSurface genus = buildGenusG(config.genus, config.meshResolution.handle);
  HandleCut handle = cutHandle(genus, kHandleRadius);
  const double smallest = config.epsilonSchedule.back();
  CappedSphere capped = buildCappedSphere(profile, handle.hole, smallest / 2, true);
  const auto outer = faceRange(0, capped.flatFaceBegin);
  const VertexId centre[1] = {*capped.center};
  const double eps0 = config.effectiveEpsilon0();

  std::string lastProblem;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const std::uint64_t seed = config.seed + attempt;
    DiscreteSurface surface = perturbMetric(capped.surface, config.perturbationAmplitude, seed, outer);
    auto pairs = solveLowest(assemble(surface), config.kEigs, {.tol = config.tol, .seed = config.seed});
    const GapReport gap = spectralGapReport(pairs);
    const NodalSet nodal = extractNodalSet(surface, pairs[1].eigenfunction);
    const double margin = nodalDistance(nodal, dijkstra(surface, centre));
    const int domains = countNodalDomains(surface, pairs[1].eigenfunction);
    if (!gap.simple) {
      lastProblem = "spectrum not simple (relative gap " + formatDouble(gap.minRelativeGap, "%.3g") + ")";
    } else if (!(margin > eps0)) {
      lastProblem = "first nodal line within " + formatDouble(margin, "%.4g") + " of the flat centre";
    } else if (domains != 2) {
      lastProblem = "first eigenfunction has " + std::to_string(domains) + " nodal domains";
    } else {
      return ReferenceData{profile,          std::move(handle), std::move(capped), std::move(surface),
                           std::move(pairs), gap,               seed,              attempt + 1,
                           margin,           domains};
    }
  }
  throw ConstructionError("reference surface not generic after " + std::to_string(kMaxAttempts) +
                          " perturbation seeds: " + lastProblem);
}

GluedMember buildGluedMember(const CappedProfile& profile, const HandleCut& handle, double epsilon, double amplitude,
                             std::uint64_t sphereSeed, std::uint64_t handleSeed) {
  CappedSphere part = buildCappedSphere(profile, handle.hole, epsilon / 2, false);
  DiscreteSurface sphere = perturbMetric(part.surface, amplitude, sphereSeed, faceRange(0, part.flatFaceBegin));
  GluedSurface glued = glueFamily({sphere, handle.handle, epsilon});
  DiscreteSurface surface = perturbMetric(glued.surface, amplitude, handleSeed,
                                          faceRange(glued.handleFaces.begin, glued.handleFaces.end));
  return {std::move(part), std::move(sphere), std::move(glued), std::move(surface)};
}

int workerCount() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("NODAL_CONTACT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && v >= 1) n = std::min<long>(n, v);
  }
  return n;
}

namespace {

EpsilonRecord sweepOne(const SweepConfig& config, const ReferenceData& ref, double epsilon) {
  EpsilonRecord rec;
  rec.epsilon = epsilon;
  try {
    std::optional<GluedMember> member;
    bool simple = false;
    std::vector<EigenPair> pairs;
    for (int attempt = 0; attempt < kMaxAttempts && !simple; ++attempt) {
      rec.handleSeed = splitmix64(ref.seedUsed) + attempt;
      member.emplace(buildGluedMember(ref.profile, ref.handle, epsilon, config.perturbationAmplitude, ref.seedUsed,
                                      rec.handleSeed));
      if (member->part.flatFaceBegin != ref.capped.flatFaceBegin) {
        throw GeometryError("sphere part does not share the reference outer mesh");
      }
      pairs = solveLowest(assemble(member->surface), config.kEigs, {.tol = config.tol, .seed = config.seed});
      simple = spectralGapReport(pairs).simple;
      if (!simple) rec.flags.push_back("non-simple spectrum with handle seed " + std::to_string(rec.handleSeed));
    }
    if (!simple) rec.flags.push_back("spectrum not simple after retries");
    const CappedSphere& part = member->part;
    const DiscreteSurface& sphere = member->spherePart;
    const GluedSurface& glued = member->glued;
    const auto surface = std::make_shared<const DiscreteSurface>(member->surface);
    rec.vertices = surface->numVertices();
    rec.genus = surface->genus();

    // Sphere part minus the disc of radius epsilon0/2 around the centre; the
    // flat chart gives exact distances on the hole ring.
    std::vector<double> initial;
    for (int j = 0; j < static_cast<int>(part.holeRing.size()); ++j) {
      const Vec2& h = ref.handle.hole.loop[j];
      initial.push_back(epsilon / 2 * std::hypot(h[0], h[1]));
    }
    const auto dist = dijkstra(sphere, part.holeRing, initial);
    const double eps0 = config.effectiveEpsilon0();
    std::vector<FaceId> region;
    for (FaceId f = glued.sphereFaces.begin; f < glued.sphereFaces.end; ++f) {
      const Face& t = surface->faces()[f];
      if (dist[t[0]] >= eps0 / 2 && dist[t[1]] >= eps0 / 2 && dist[t[2]] >= eps0 / 2) region.push_back(f);
    }

    for (int k = 1; k <= config.kEigs; ++k) {
      const NodalReport rep = analyzeNodalSet(*surface, pairs[k].eigenfunction, std::span<const FaceId>(region));
      ModeRecord m;
      m.k = k;
      m.lambda = pairs[k].eigenvalue;
      m.absErr = std::abs(m.lambda - ref.pairs[k].eigenvalue);
      m.components = rep.componentCount;
      m.contractibleComponents = static_cast<int>(std::count(rep.contractible.begin(), rep.contractible.end(), true));
      m.contractible = m.components > 0 && m.contractibleComponents == m.components;
      m.contained = m.components > 0 && std::all_of(rep.contained->begin(), rep.contained->end(), [](bool b) { return b; });
      m.verdict = m.components > 0 ? classifyTightness(*surface, rep).verdict : Tightness::Indeterminate;
      if (rep.nearSingular) rec.flags.push_back("near-singular nodal set for k=" + std::to_string(k));
      rec.modes.push_back(m);
    }

    const Eigen::VectorXd& f1 = pairs[1].eigenfunction;
    const Eigen::VectorXd onSphere = f1.head(sphere.numVertices());
    rec.signChange = onSphere.minCoeff() < 0.0 && onSphere.maxCoeff() > 0.0;
    const int shared = part.stableVertexCount;
    const Eigen::VectorXd a = f1.head(shared), b = ref.pairs[1].eigenfunction.head(shared);
    rec.eigenfunctionDeviation = std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
    rec.surface = surface;
    rec.firstEigenfunction = f1;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.modes.clear();
    rec.flags.push_back(std::string("failed: ") + e.what());
  }
  return rec;
}

} // namespace

SweepReport runEpsilonSweep(const SweepConfig& config, const ReferenceData& reference) {
  config.validate();
  SweepReport report;
  report.config = config;
  for (const auto& p : reference.pairs) report.referenceEigenvalues.push_back(p.eigenvalue);
  report.referenceMargin = reference.margin;
  report.referenceSeed = reference.seedUsed;

  const int count = static_cast<int>(config.epsilonSchedule.size());
  report.perEpsilon.resize(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      report.perEpsilon[i] = sweepOne(config, reference, config.epsilonSchedule[i]);
    }
  };
  const int threads = std::min(workerCount(), count);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int i = count - 1; i >= 0; --i) {
    const auto& r = report.perEpsilon[i];
    if (r.failed || !r.modes[0].contained) break;
    report.containmentFrom = i;
  }

  const EpsilonRecord& last = report.perEpsilon.back();
  if (last.failed) {
    report.finalReason = "smallest epsilon failed";
  } else {
    const ModeRecord& m = last.modes[0];
    report.finalVerdict = m.components == 1 && m.contractible && m.contained && m.verdict == Tightness::Overtwisted;
    report.finalReason = std::to_string(m.components) + " nodal component(s) of f1, " +
                         (m.contractible ? "contractible" : "not contractible") + ", " +
                         (m.contained ? "contained in the sphere part" : "not contained in the sphere part") +
                         ", verdict " + toString(m.verdict);
  }
  return report;
}

SweepReport runEpsilonSweep(const SweepConfig& config) { return runEpsilonSweep(config, runReference(config)); }

nlohmann::ordered_json toJson(const SweepReport& report) {
  nlohmann::ordered_json j;
  j["genus"] = report.config.genus;
  j["config"] = toJson(report.config);
  j["reference"] = {{"eigenvalues", report.referenceEigenvalues},
                    {"margin", report.referenceMargin},
                    {"seed", report.referenceSeed}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& r : report.perEpsilon) {
    nlohmann::ordered_json row;
    row["epsilon"] = r.epsilon;
    row["failed"] = r.failed;
    row["flags"] = r.flags;
    row["vertices"] = r.vertices;
    row["genus"] = r.genus;
    row["handle_seed"] = r.handleSeed;
    nlohmann::ordered_json modes = nlohmann::ordered_json::array();
    for (const auto& m : r.modes) {
      modes.push_back({{"k", m.k},
                       {"lambda", m.lambda},
                       {"abs_err", m.absErr},
                       {"components", m.components},
                       {"contractible_components", m.contractibleComponents},
                       {"contractible", m.contractible},
                       {"contained", m.contained},
                       {"verdict", toString(m.verdict)}});
      table.push_back({{"epsilon", r.epsilon}, {"k", m.k}, {"abs_err", m.absErr}});
    }
    row["modes"] = std::move(modes);
    row["sign_change_on_sphere_part"] = r.signChange;
    row["f1_max_deviation"] = r.eigenfunctionDeviation;
    rows.push_back(std::move(row));
  }
  j["per_epsilon"] = std::move(rows);
  j["convergence_table"] = std::move(table);
  j["containment_from"] = report.containmentFrom ? nlohmann::ordered_json(*report.containmentFrom) : nullptr;
  j["final_verdict"] = report.finalVerdict;
  j["final_reason"] = report.finalReason;
  return j;
}

std::vector<std::filesystem::path> emitReport(const SweepReport& report, const std::filesystem::path& outDir) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw IoError("cannot create " + outDir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    const auto path = outDir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    written.push_back(path);
    return out;
  };

  {
    auto csv = open("report.csv");
    csv << "epsilon,k,lambda,abs_err,components,contractible,contained,verdict\n";
    for (const auto& r : report.perEpsilon) {
      for (int k = 1; k <= report.config.kEigs; ++k) {
        csv << formatDouble(r.epsilon) << ',' << k << ',';
        if (r.failed) {
          csv << "nan,nan,0,false,false,Failed\n";
          continue;
        }
        const ModeRecord& m = r.modes[k - 1];
        csv << formatDouble(m.lambda) << ',' << formatDouble(m.absErr, "%.6e") << ',' << m.components << ','
            << (m.contractible ? "true" : "false") << ',' << (m.contained ? "true" : "false") << ','
            << toString(m.verdict) << '\n';
      }
    }
  }
  {
    auto js = open("report.json");
    js << toJson(report).dump(2) << '\n';
  }
  for (std::size_t i = 0; i < report.perEpsilon.size(); ++i) {
    const auto& r = report.perEpsilon[i];
    if (r.failed || !r.surface || !r.surface->embedding()) continue;
    const auto path = outDir / ("nodal_eps_" + std::to_string(i) + ".svg");
    writeNodalSvg(path, *r.surface, r.firstEigenfunction,
                  {.title = "genus " + std::to_string(report.config.genus) + ", epsilon = " + formatDouble(r.epsilon)});
    written.push_back(path);
  }
  {
    auto txt = open("summary.txt");
    const auto& c = report.config;
    txt << "Eigenfunction sweep, genus " << c.genus << "\n";
    txt << "schedule: " << c.epsilonSchedule.size() << " values from " << formatDouble(c.epsilonSchedule.front())
        << " to " << formatDouble(c.epsilonSchedule.back()) << ", epsilon0 = " << formatDouble(c.effectiveEpsilon0())
        << ", seed " << c.seed << "\n";
    txt << "reference: lambda_1 = " << formatDouble(report.referenceEigenvalues.at(1), "%.8f")
        << ", nodal margin = " << formatDouble(report.referenceMargin, "%.4f") << ", perturbation seed "
        << report.referenceSeed << "\n\n";
    txt << "epsilon        lambda_1      rel_err     comps  contractible  contained  verdict\n";
    for (const auto& r : report.perEpsilon) {
      char line[160];
      if (r.failed) {
        std::snprintf(line, sizeof line, "%-14s %s\n", formatDouble(r.epsilon, "%.6g").c_str(), "FAILED");
      } else {
        const ModeRecord& m = r.modes[0];
        std::snprintf(line, sizeof line, "%-14s %-13.8f %-11.3e %-6d %-13s %-10s %s\n",
                      formatDouble(r.epsilon, "%.6g").c_str(), m.lambda, m.absErr / report.referenceEigenvalues[1],
                      m.components, m.contractible ? "yes" : "no", m.contained ? "yes" : "no",
                      toString(m.verdict).c_str());
      }
      txt << line;
      for (const auto& flag : r.flags) txt << "    flag: " << flag << "\n";
    }
    txt << "\n";
    if (report.containmentFrom) {
      txt << "containment holds from epsilon = "
          << formatDouble(report.perEpsilon[*report.containmentFrom].epsilon) << " on\n";
    } else {
      txt << "containment does not hold at the smallest epsilon\n";
    }
    txt << "final: " << report.finalReason << "\n";
    txt << "Overtwisted: " << (report.finalVerdict ? "YES" : "NO") << "\n";
  }
  return written;
}

} // namespace nodal_contact
