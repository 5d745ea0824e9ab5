#include "isl/config.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "isl/error.hpp"

namespace isl
{

using nlohmann::json;

namespace
{

void require_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
  if (!j.is_object())
  {
    throw InvalidInput(where + " must be an object");
  }
  for (const auto &[k, v] : j.items())
  {
    if (!allowed.count(k))
    {
      throw InvalidInput("unknown key '" + k + "' in " + where);
    }
  }
}

double number(const json &j, const std::string &what)
{
  if (!j.is_number())
  {
    throw InvalidInput(what + " must be a number");
  }
  return j.get<double>();
}

std::vector<double> numbers(const json &j, const std::string &what)
{
  if (!j.is_array())
  {
    throw InvalidInput(what + " must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto &v : j)
  {
    out.push_back(number(v, what));
  }
  return out;
}

const json &field(const json &j, const char *key, const std::string &where)
{
  if (!j.contains(key))
  {
    throw InvalidInput(where + " needs '" + key + "'");
  }
  return j.at(key);
}

EndCondition parse_end(const json &j, const char *which)
{
  if (j.is_string())
  {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "dirichlet")
    {
      return Dirichlet{};
    }
    throw InvalidInput(std::string("separated.") + which + " must be a number or \"inf\"");
  }
  return number(j, std::string("separated.") + which);
}

json settings_json(const Settings &s)
{
  return json{{"quad_tol", s.quadrature.abs_tol_per_length},
              {"panels", s.panels},
              {"grid_n", s.grid_n},
              {"trust_window", s.trust_window},
              {"eps_resolution", s.eps_resolution},
              {"mesh_tol", s.mesh_tol},
              {"dense_limit", s.dense_limit},
              {"debug_scale_c_d", s.debug_scale_c_d}};
}

Settings parse_settings(const json &j)
{
  Settings s;
  if (j.is_null())
  {
    return s;
  }
  require_keys(j,
               {"quad_tol", "panels", "grid_n", "trust_window", "eps_resolution", "mesh_tol",
                "dense_limit", "debug_scale_c_d"},
               "settings");
  if (j.contains("quad_tol"))
  {
    s.quadrature.abs_tol_per_length = number(j["quad_tol"], "settings.quad_tol");
  }
  if (j.contains("panels"))
  {
    s.panels = static_cast<long>(number(j["panels"], "settings.panels"));
  }
  if (j.contains("grid_n"))
  {
    s.grid_n = static_cast<int>(number(j["grid_n"], "settings.grid_n"));
  }
  if (j.contains("trust_window"))
  {
    s.trust_window = number(j["trust_window"], "settings.trust_window");
  }
  if (j.contains("eps_resolution"))
  {
    s.eps_resolution = number(j["eps_resolution"], "settings.eps_resolution");
  }
  if (j.contains("mesh_tol"))
  {
    s.mesh_tol = number(j["mesh_tol"], "settings.mesh_tol");
  }
  if (j.contains("dense_limit"))
  {
    s.dense_limit = static_cast<int>(number(j["dense_limit"], "settings.dense_limit"));
  }
  if (j.contains("debug_scale_c_d"))
  {
    s.debug_scale_c_d = number(j["debug_scale_c_d"], "settings.debug_scale_c_d");
  }
  if (!(s.quadrature.abs_tol_per_length > 0.0) || s.panels < 100 || s.grid_n < 100 ||
      !(s.trust_window > 0.0) || !(s.eps_resolution > 0.0) || !(s.mesh_tol >= 0.0) ||
      s.dense_limit < 0 || !(s.debug_scale_c_d >= 0.0))
  {
    throw InvalidInput("settings out of range (panels >= 100, grid_n >= 100, positive tolerances)");
  }
  return s;
}

}  // namespace

Fn1D parse_fn(const json &j)
{
  if (j.is_number())
  {
    return Fn1D::constant(j.get<double>());
  }
  if (!j.is_object() || j.size() != 1)
  {
    throw InvalidInput("a function must be a number or an object with exactly one tag, got " +
                       j.dump());
  }
  const std::string tag = j.begin().key();
  const json &body = j.begin().value();
  if (tag == "const")
  {
    return Fn1D::constant(number(body, "const"));
  }
  if (tag == "poly")
  {
    return Fn1D::polynomial(numbers(body, "poly"));
  }
  if (tag == "sign_step")
  {
    require_keys(body, {"x0"}, "sign_step");
    return Fn1D::sign_step(number(field(body, "x0", "sign_step"), "sign_step.x0"));
  }
  if (tag == "scaled_osc")
  {
    require_keys(body, {"c", "k"}, "scaled_osc");
    return Fn1D::scaled_oscillator(number(field(body, "c", "scaled_osc"), "scaled_osc.c"),
                                   number(field(body, "k", "scaled_osc"), "scaled_osc.k"));
  }
  if (tag == "table")
  {
    require_keys(body, {"x", "y"}, "table");
    return Fn1D::table(numbers(field(body, "x", "table"), "table.x"),
                       numbers(field(body, "y", "table"), "table.y"));
  }
  if (tag == "piecewise")
  {
    require_keys(body, {"breaks", "pieces"}, "piecewise");
    const auto &pj = field(body, "pieces", "piecewise");
    if (!pj.is_array())
    {
      throw InvalidInput("piecewise.pieces must be an array");
    }
    std::vector<Fn1D> pieces;
    for (const auto &x : pj)
    {
      pieces.push_back(parse_fn(x));
    }
    return Fn1D::piecewise(numbers(field(body, "breaks", "piecewise"), "piecewise.breaks"),
                           std::move(pieces));
  }
  throw InvalidInput("unknown function tag '" + tag + "'");
}

SelfadjointDomain parse_domain(const json &j)
{
  if (j.is_string() && j.get<std::string>() == "dirichlet")
  {
    return SelfadjointDomain::dirichlet();
  }
  if (!j.is_object() || j.size() != 1)
  {
    throw InvalidInput("domain must be \"dirichlet\", {\"separated\": ...} or {\"coupled\": ...}");
  }
  const std::string tag = j.begin().key();
  const json &body = j.begin().value();
  if (tag == "separated")
  {
    require_keys(body, {"l", "r"}, "separated");
    return SelfadjointDomain::separated(parse_end(field(body, "l", "separated"), "l"),
                                        parse_end(field(body, "r", "separated"), "r"));
  }
  if (tag == "coupled")
  {
    require_keys(body, {"phi", "R"}, "coupled");
    const auto &R = field(body, "R", "coupled");
    if (!R.is_array() || R.size() != 2 || !R[0].is_array() || R[0].size() != 2 ||
        !R[1].is_array() || R[1].size() != 2)
    {
      throw InvalidInput("coupled.R must be a 2x2 array");
    }
    Eigen::Matrix2d M;
    for (int r = 0; r < 2; r++)
    {
      for (int c = 0; c < 2; c++)
      {
        M(r, c) = number(R[r][c], "coupled.R");
      }
    }
    return SelfadjointDomain::coupled(number(field(body, "phi", "coupled"), "coupled.phi"), M);
  }
  throw InvalidInput("unknown domain tag '" + tag + "'");
}

ProblemConfig parse_config(const json &j)
{
  require_keys(j, {"name", "interval", "p", "q", "w", "domain", "g", "g_prime", "settings"},
               "config");
  ProblemConfig cfg;
  if (j.contains("name"))
  {
    if (!j["name"].is_string())
    {
      throw InvalidInput("name must be a string");
    }
    cfg.name = j["name"].get<std::string>();
  }
  const auto iv = numbers(field(j, "interval", "config"), "interval");
  if (iv.size() != 2 || !(iv[0] < iv[1]))
  {
    throw InvalidInput("interval must be [a, b] with a < b");
  }
  cfg.interval = {iv[0], iv[1]};
  cfg.p = parse_fn(field(j, "p", "config"));
  cfg.q = parse_fn(field(j, "q", "config"));
  cfg.w = parse_fn(field(j, "w", "config"));
  cfg.domain = parse_domain(field(j, "domain", "config"));
  if (j.contains("g"))
  {
    cfg.g = parse_fn(j["g"]);
  }
  if (j.contains("g_prime"))
  {
    if (!cfg.g)
    {
      throw InvalidInput("g_prime given without g");
    }
    cfg.g_prime = parse_fn(j["g_prime"]);
  }
  cfg.settings = parse_settings(j.contains("settings") ? j["settings"] : json());
  cfg.resolved = j;
  refresh_resolved(cfg);
  return cfg;
}

ProblemConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidInput("cannot open config '" + path + "'");
  }
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void refresh_resolved(ProblemConfig &cfg)
{
  cfg.resolved["settings"] = settings_json(cfg.settings);
}

std::string config_hash(const json &resolved)
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : resolved.dump())
  {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace isl
