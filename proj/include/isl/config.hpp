#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "isl/coeffs.hpp"
#include "isl/domains.hpp"
#include "isl/fn1d.hpp"

namespace isl
{

struct Settings
{
  QuadratureOptions quadrature;
  long panels = 200000;         // sublevel-measure panels
  int grid_n = 500;             // coarse mesh of the N, 2N ladder
  double trust_window = 1e4;
  double eps_resolution = 1e-6;
  double mesh_tol = 1e-3;
  int dense_limit = 400;
  // Test hook: multiplies c(D) before it enters any bound or check.
  double debug_scale_c_d = 1.0;
};

struct ProblemConfig
{
  std::string name;
  Interval interval;
  Fn1D p, q, w;
  SelfadjointDomain domain = SelfadjointDomain::dirichlet();
  std::optional<Fn1D> g;
  std::optional<Fn1D> g_prime;
  Settings settings;
  // The parsed document with every setting filled in; hashed into reports.
  nlohmann::json resolved;
};

Fn1D parse_fn(const nlohmann::json &j);
SelfadjointDomain parse_domain(const nlohmann::json &j);
ProblemConfig parse_config(const nlohmann::json &j);
ProblemConfig load_config(const std::string &path);

// Re-resolves after settings were changed programmatically (CLI overrides).
void refresh_resolved(ProblemConfig &cfg);

// FNV-1a 64-bit of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json &resolved);

}  // namespace isl
