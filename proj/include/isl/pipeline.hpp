#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isl/bounds.hpp"
#include "isl/config.hpp"
#include "isl/eigensolve.hpp"

namespace isl
{

struct VariantOutcome
{
  BoundVariant variant = BoundVariant::GeneralG;
  std::string status;  // "ok", "unsatisfiable", "not_applicable"
  std::string reason;
  std::optional<BoundReport> report;
};

struct BoundsStage
{
  BoundConstants constants;
  TurningPoints turning;
  std::vector<int> signs;
  std::optional<AdmissibleG> g;
  std::optional<GDiagnostics> g_check;
  std::string g_status;  // why g is missing, if it is
  std::vector<VariantOutcome> variants;
  std::optional<BoundReport> combined;
};

struct EntryChecks
{
  int index = 0;
  std::optional<NormCheckReport> norms;
  std::optional<IdentityReport> identities;
  BoundaryCheck boundary;
};

struct VerifyStage
{
  bool passed = true;
  std::optional<BoundVerdict> bounds;
  std::vector<EntryChecks> entries;
  std::vector<std::string> failures;
};

struct RunResult
{
  std::string command;
  int exit_code = 0;
  nlohmann::json report;
  std::string spectrum_csv;
  std::string bounds_csv;
  std::string text;
  std::optional<BoundsStage> bounds;
  std::optional<Spectrum> spectrum;
  std::optional<VerifyStage> verify;
};

Coefficients make_coefficients(const ProblemConfig &cfg);

BoundsStage compute_bounds_stage(const ProblemConfig &cfg, const Coefficients &c);
Spectrum compute_spectrum(const ProblemConfig &cfg, const Coefficients &c);
VerifyStage verify_stage(const ProblemConfig &cfg, const BoundsStage &b, const Spectrum &s);

RunResult cmd_bounds(const ProblemConfig &cfg);
RunResult cmd_solve(const ProblemConfig &cfg);
RunResult cmd_verify(const ProblemConfig &cfg);

// report.json, spectrum.csv (when a spectrum exists) and bounds.csv (when bounds exist).
void write_outputs(const RunResult &r, const std::string &dir);

}  // namespace isl
