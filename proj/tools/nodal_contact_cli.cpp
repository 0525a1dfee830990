// Command-line front end: mesh | eig | nodal | contact | sweep.

#include "nodal_contact/contact.hpp"
#include "nodal_contact/errors.hpp"
#include "nodal_contact/experiments.hpp"
#include "nodal_contact/generators.hpp"
#include "nodal_contact/mesh_io.hpp"
#include "nodal_contact/nodal.hpp"
#include "nodal_contact/spectral.hpp"
#include "nodal_contact/surgery.hpp"
#include "nodal_contact/svg.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace nodal_contact;

namespace {

enum Exit { kOk = 0, kUsage = 2, kSolver = 3, kContact = 4, kVerdict = 5 };

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

fs::path prepareOut(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

void printSummary(const DiscreteSurface& s) {
  fmt::print("V={} E={} F={} chi={} genus={} boundary_loops={}\n", s.numVertices(), s.numEdges(), s.numFaces(),
             s.eulerCharacteristic(), s.genus(), s.boundaryLoops().size());
}

const EigenPair& pickPair(const std::vector<EigenPair>& pairs, int k) {
  for (const auto& p : pairs) {
    if (p.index == k) return p;
  }
  throw UsageError("eigenpair file has no index " + std::to_string(k));
}

void checkSize(const DiscreteSurface& s, const EigenPair& p) {
  if (p.eigenfunction.size() != s.numVertices()) {
    throw UsageError("eigenfunction has " + std::to_string(p.eigenfunction.size()) + " values but the surface has " +
                     std::to_string(s.numVertices()) + " vertices");
  }
}

struct Options {
  std::string out = ".";
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int k = 1;
};

// mesh
struct MeshArgs {
  std::string kind;
  int subdiv = 3;
  int n = 32, m = 32;
  int genus = 1;
  int resolution = 4;
  double epsilon = 0.25;
  double amplitude = 0.0;
  bool off = false;
};

int cmdMesh(const MeshArgs& a, const Options& o) {
  std::optional<DiscreteSurface> surface;
  RegionMap regions;
  if (a.kind == "sphere") {
    surface = buildRoundSphere(a.subdiv);
  } else if (a.kind == "torus") {
    surface = buildFlatTorus(a.n, a.m);
  } else if (a.kind == "genus") {
    surface = buildGenusG(a.genus, a.resolution).surface;
  } else if (a.kind == "glued") {
    if (!(a.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
    const HandleCut handle = cutHandle(buildGenusG(a.genus, a.resolution), 1.0);
    GluedMember member = buildGluedMember(CappedProfile{}, handle, a.epsilon, a.amplitude, o.seed, splitmix64(o.seed));
    for (FaceId f = member.glued.sphereFaces.begin; f < member.glued.sphereFaces.end; ++f) regions["sphere_part"].push_back(f);
    for (FaceId f = member.glued.handleFaces.begin; f < member.glued.handleFaces.end; ++f) regions["handle_part"].push_back(f);
    surface = std::move(member.surface);
  } else {
    throw UsageError("unknown generator '" + a.kind + "'");
  }
  if (a.amplitude > 0.0 && a.kind != "glued") surface = perturbMetric(*surface, a.amplitude, o.seed);
  const fs::path dir = prepareOut(o.out);
  writeSurfaceJson(dir / "surface.json", *surface, regions);
  if (a.off) writeOff(dir / "surface.off", *surface);
  printSummary(*surface);
  fmt::print("wrote {}\n", (dir / "surface.json").string());
  return kOk;
}

// eig
struct EigArgs {
  std::string surface;
  bool oracle = false;
  bool matrices = false;
  bool consistent = false;
};

int cmdEig(const EigArgs& a, const Options& o) {
  const LoadedSurface in = readSurfaceJson(a.surface);
  if (o.k < 0 || o.k >= in.surface.numVertices()) throw UsageError("--k must lie in [0, vertex count)");
  const OperatorPair ops = assemble(in.surface, a.consistent ? MassKind::Consistent : MassKind::Lumped);
  const auto pairs = solveLowest(ops, o.k, {.tol = o.tol, .seed = o.seed});
  const fs::path dir = prepareOut(o.out);
  writeEigenpairs(dir / "eigenpairs.json", pairs);
  if (a.matrices) {
    writeMatrixMarket(dir / "stiffness.mtx", ops.stiffness);
    writeMatrixMarket(dir / "mass.mtx", ops.mass);
  }
  fmt::print("{:>4}  {:>20}  {:>10}\n", "k", "lambda", "residual");
  for (const auto& p : pairs) fmt::print("{:>4}  {:>20.12f}  {:>10.2e}\n", p.index, p.eigenvalue, p.residual);
  const GapReport gap = pairs.size() >= 2 ? spectralGapReport(pairs) : GapReport{};
  if (pairs.size() >= 2) {
    fmt::print("min relative gap {:.3e} at k={} ({})\n", gap.minRelativeGap, gap.argmin,
               gap.simple ? "simple" : "not simple");
  }
  if (a.oracle) {
    if (in.surface.numVertices() > 2000) throw UsageError("--oracle needs at most 2000 vertices");
    const auto dense = denseOracle(ops, o.k);
    double worst = 0.0;
    for (int i = 1; i <= o.k; ++i) {
      worst = std::max(worst, std::abs(pairs[i].eigenvalue - dense[i].eigenvalue) / std::abs(dense[i].eigenvalue));
    }
    const bool pass = worst <= 1e-8;
    fmt::print("oracle agreement: {} (max relative difference {:.2e})\n", pass ? "PASS" : "FAIL", worst);
    if (!pass) return kSolver;
  }
  return kOk;
}

// nodal
struct NodalArgs {
  std::string surface;
  std::string eigenpairs;
  std::string region;
};

int cmdNodal(const NodalArgs& a, const Options& o) {
  const LoadedSurface in = readSurfaceJson(a.surface);
  const auto pairs = readEigenpairs(a.eigenpairs);
  const EigenPair& pair = pickPair(pairs, o.k);
  checkSize(in.surface, pair);
  std::optional<std::span<const FaceId>> region;
  if (!a.region.empty()) {
    const auto it = in.regions.find(a.region);
    if (it == in.regions.end()) throw UsageError("surface has no region '" + a.region + "'");
    region = std::span<const FaceId>(it->second);
  }
  const NodalSet nodal = extractNodalSet(in.surface, pair.eigenfunction);
  const NodalReport report = analyzeNodalSet(in.surface, pair.eigenfunction, region);
  const fs::path dir = prepareOut(o.out);
  writeNodalJson(dir / "nodal.json", nodal, report);
  if (in.surface.embedding()) {
    writeNodalSvg(dir / "nodal.svg", in.surface, pair.eigenfunction, {.title = fmt::format("k = {}", pair.index)});
  }
  fmt::print("components: {}, domains: {}\n", report.componentCount, report.domainCount);
  std::vector<std::string> contractible;
  for (int i = 0; i < report.componentCount; ++i) {
    if (report.contractible[i]) contractible.push_back(std::to_string(i));
  }
  std::string list;
  for (const auto& c : contractible) list += (list.empty() ? "" : ", ") + c;
  fmt::print("contractible: {}\n", contractible.empty() ? "none" : list);
  if (report.contained) {
    std::string flags;
    for (bool b : *report.contained) flags += (flags.empty() ? "" : ", ") + std::string(b ? "true" : "false");
    fmt::print("contained in {}: [{}]\n", a.region, flags);
  }
  if (report.nearSingular) fmt::print("warning: {} vertex zeros, nodal set near-singular\n", nodal.vertexZeros.size());
  const bool courant = pair.index == 0 || report.domainCount <= pair.index + 1;
  fmt::print("courant bound (domains <= k+1): {}\n", courant ? "ok" : "violated");
  return kOk;
}

// contact
struct ContactArgs {
  std::string surface;
  std::string eigenpairs;
};

int cmdContact(const ContactArgs& a, const Options& o) {
  const LoadedSurface in = readSurfaceJson(a.surface);
  const auto pairs = readEigenpairs(a.eigenpairs);
  const EigenPair& pair = pickPair(pairs, o.k);
  checkSize(in.surface, pair);
  if (!(pair.eigenvalue > 0.0) || pair.index == 0) throw UsageError("contact form needs a positive eigenvalue");
  const InducedContactForm form = induceContactForm(in.surface, pair);
  const fs::path dir = prepareOut(o.out);
  writeContactForm(dir / "contact_form.json", in.surface, form);
  const ContactConditionReport cond = verifyContactCondition(in.surface, form);
  const CurlResiduals res = verifyCurlEigenform(in.surface, form);
  fmt::print("min-q: {:.6e} at vertex {} (max-q {:.6e})\n", cond.minQ, cond.argmin, cond.maxQ);
  fmt::print("r1: {:.3e}\nr2: {:.3e}\n", res.r1, res.r2);
  if (!cond.positive) {
    fmt::print("contact condition fails: f and df vanish together near vertex {}\n", cond.argmin);
    return kContact;
  }
  const NodalReport report = analyzeNodalSet(in.surface, pair.eigenfunction);
  const TightnessVerdict verdict = classifyTightness(in.surface, report);
  fmt::print("verdict: {}\n{}\n", toString(verdict.verdict), verdict.reason);
  return kOk;
}

// sweep
struct SweepArgs {
  std::string config;
  std::optional<int> genus;
  std::optional<int> kEigs;
  std::optional<double> tol;
};

int cmdSweep(const SweepArgs& a, const Options& o, bool seedGiven) {
  SweepConfig config = a.config.empty() ? SweepConfig{} : loadSweepConfig(a.config);
  if (a.genus) config.genus = *a.genus;
  if (a.kEigs) config.kEigs = *a.kEigs;
  if (a.tol) config.tol = *a.tol;
  if (seedGiven) config.seed = o.seed;
  config.validate();
  const ReferenceData ref = runReference(config);
  fmt::print("reference: lambda_1 = {:.8f}, margin {:.4f}, seed {}\n", ref.pairs[1].eigenvalue, ref.margin,
             ref.seedUsed);
  const SweepReport report = runEpsilonSweep(config, ref);
  for (const auto& r : report.perEpsilon) {
    if (r.failed) {
      fmt::print("eps {:<12g} FAILED\n", r.epsilon);
    } else {
      const ModeRecord& m = r.modes[0];
      fmt::print("eps {:<12g} lambda_1 {:.8f}  components {}  contractible {}  contained {}  {}\n", r.epsilon,
                 m.lambda, m.components, m.contractible, m.contained, toString(m.verdict));
    }
  }
  const auto files = emitReport(report, prepareOut(o.out));
  fmt::print("wrote {} files to {}\n", files.size(), o.out);
  fmt::print("Overtwisted: {}\n", report.finalVerdict ? "YES" : "NO");
  return report.finalVerdict ? kOk : kVerdict;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nodal sets of Laplace eigenfunctions and the contact forms they induce"};
  app.require_subcommand(1);
  Options o;

  auto addCommon = [&o](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Perturbation and solver seed")->capture_default_str();
  };

  MeshArgs meshArgs;
  auto* mesh = app.add_subcommand("mesh", "Generate a surface descriptor");
  mesh->add_option("kind", meshArgs.kind, "sphere | torus | genus | glued")
      ->required()
      ->check(CLI::IsMember({"sphere", "torus", "genus", "glued"}));
  mesh->add_option("--subdiv", meshArgs.subdiv, "Sphere subdivision level (0..8)")->capture_default_str();
  mesh->add_option("--n", meshArgs.n, "Torus grid size in x")->capture_default_str();
  mesh->add_option("--m", meshArgs.m, "Torus grid size in y")->capture_default_str();
  mesh->add_option("--genus", meshArgs.genus, "Genus of the handle surface")->capture_default_str();
  mesh->add_option("--resolution", meshArgs.resolution, "Lattice steps per unit of the handle")->capture_default_str();
  mesh->add_option("--epsilon", meshArgs.epsilon, "Collapse parameter of the glued surface")->capture_default_str();
  mesh->add_option("--amplitude", meshArgs.amplitude, "Relative edge-length perturbation")->capture_default_str();
  mesh->add_flag("--off", meshArgs.off, "Also write surface.off with a lengths sidecar");
  addCommon(mesh);

  EigArgs eigArgs;
  auto* eig = app.add_subcommand("eig", "Lowest Laplace-Beltrami eigenpairs");
  eig->add_option("surface", eigArgs.surface, "Surface descriptor JSON")->required()->check(CLI::ExistingFile);
  int eigK = 6;
  eig->add_option("--k", eigK, "Highest eigenpair index")->capture_default_str();
  eig->add_option("--tol", o.tol, "Relative residual tolerance")->capture_default_str();
  eig->add_flag("--oracle", eigArgs.oracle, "Cross-check with a dense solve");
  eig->add_flag("--matrices", eigArgs.matrices, "Write stiffness.mtx and mass.mtx");
  eig->add_flag("--consistent-mass", eigArgs.consistent, "Use the consistent instead of the lumped mass");
  addCommon(eig);

  NodalArgs nodalArgs;
  auto* nodal = app.add_subcommand("nodal", "Nodal set of one eigenfunction");
  nodal->add_option("surface", nodalArgs.surface, "Surface descriptor JSON")->required()->check(CLI::ExistingFile);
  nodal->add_option("eigenpairs", nodalArgs.eigenpairs, "Eigenpair JSON")->required()->check(CLI::ExistingFile);
  nodal->add_option("--k", o.k, "Eigenpair index")->capture_default_str();
  nodal->add_option("--region", nodalArgs.region, "Named face region for the containment check");
  addCommon(nodal);

  ContactArgs contactArgs;
  auto* contact = app.add_subcommand("contact", "Induced contact form and tightness verdict");
  contact->add_option("surface", contactArgs.surface, "Surface descriptor JSON")->required()->check(CLI::ExistingFile);
  contact->add_option("eigenpairs", contactArgs.eigenpairs, "Eigenpair JSON")->required()->check(CLI::ExistingFile);
  contact->add_option("--k", o.k, "Eigenpair index")->capture_default_str();
  addCommon(contact);

  SweepArgs sweepArgs;
  auto* sweep = app.add_subcommand("sweep", "Collapsing-handle experiment over an epsilon schedule");
  sweep->add_option("--config", sweepArgs.config, "Sweep configuration JSON")->check(CLI::ExistingFile);
  sweep->add_option("--genus", sweepArgs.genus, "Override the configured genus");
  sweep->add_option("--k", sweepArgs.kEigs, "Override k_eigs");
  sweep->add_option("--tol", sweepArgs.tol, "Override the solver tolerance");
  addCommon(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*mesh) return cmdMesh(meshArgs, o);
    if (*eig) {
      o.k = eigK;
      return cmdEig(eigArgs, o);
    }
    if (*nodal) return cmdNodal(nodalArgs, o);
    if (*contact) return cmdContact(contactArgs, o);
    if (*sweep) return cmdSweep(sweepArgs, o, sweep->count("--seed") > 0);
  } catch (const SolverError& e) {
    fmt::print(stderr, "solver error: {} (best residual {:.3e})\n", e.what(), e.bestResidual());
    return kSolver;
  } catch (const ConstructionError& e) {
    fmt::print(stderr, "construction failed: {}\n", e.what());
    return kVerdict;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
  return kUsage;
}
