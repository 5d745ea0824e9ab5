#include "isl/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "isl/error.hpp"

namespace isl
{

using nlohmann::json;

namespace
{

json j_number(double v)
{
  if (!std::isfinite(v))
  {
    return nullptr;
  }
  return v;
}

json j_constants(const BoundConstants &bc)
{
  return json{{"c_D", bc.c_D},
              {"alpha", bc.alpha},
              {"beta", bc.beta},
              {"gamma", bc.gamma},
              {"delta", bc.delta ? json(*bc.delta) : json(nullptr)},
              {"norms",
               {{"q_minus_l1", bc.norms.q_minus_l1},
                {"p_inv_l1", bc.norms.p_inv_l1},
                {"q_l1", bc.norms.q_l1},
                {"w_l1", bc.norms.w_l1},
                {"w_integral", bc.norms.w_integral}}}};
}

json j_eps(const EpsSelection &e)
{
  return json{{"eps", j_number(e.eps)},
              {"measure_at_eps", e.measure_at_eps},
              {"threshold", j_number(e.threshold)},
              {"search_resolution", e.search_resolution},
              {"sup", e.sup},
              {"total_measure", e.total_measure},
              {"capped", e.capped},
              {"measured", e.measured}};
}

json j_bound(const BoundReport &r)
{
  json j{{"variant", to_string(r.variant)},
         {"im_bound", j_number(r.im_bound)},
         {"re_bound", j_number(r.re_bound)},
         {"exceptional_bound", j_number(r.exceptional_bound)},
         {"eps", j_eps(r.eps)}};
  if (r.g_inf_norm)
  {
    j["g_inf_norm"] = *r.g_inf_norm;
    j["g_prime_p2_norm"] = *r.g_prime_p2_norm;
  }
  if (r.turning_point_count)
  {
    j["turning_point_count"] = *r.turning_point_count;
  }
  if (r.variant == BoundVariant::CombinedMin)
  {
    j["winners"] = {{"im", to_string(r.winners[0])},
                    {"re", to_string(r.winners[1])},
                    {"exceptional", to_string(r.winners[2])}};
  }
  return j;
}

json j_bounds_stage(const BoundsStage &b)
{
  json j;
  j["constants"] = j_constants(b.constants);
  j["turning_points"] = {{"enumerable", b.turning.enumerable},
                         {"points", b.turning.points},
                         {"signs", b.signs}};
  if (b.g)
  {
    json g{{"provenance", to_string(b.g->provenance)},
           {"g_inf_norm", b.g->g_inf_norm},
           {"g_prime_p2_norm", b.g->g_prime_p2_norm},
           {"g_prime_l2_norm", b.g->g_prime_l2_norm},
           {"g_a", b.g->g_a},
           {"g_b", b.g->g_b}};
    if (b.g->nu)
    {
      g["nu"] = *b.g->nu;
    }
    if (b.g->lift_x0)
    {
      g["lift_x0"] = *b.g->lift_x0;
    }
    if (b.g_check)
    {
      g["validation"] = {{"passed", b.g_check->passed},
                         {"violating_fraction", b.g_check->violating_fraction},
                         {"messages", b.g_check->messages}};
    }
    j["g"] = g;
  }
  else
  {
    j["g"] = {{"status", b.g_status}};
  }
  json variants = json::array();
  for (const auto &v : b.variants)
  {
    json x{{"variant", to_string(v.variant)}, {"status", v.status}};
    if (!v.reason.empty())
    {
      x["reason"] = v.reason;
    }
    if (v.report)
    {
      x["bounds"] = j_bound(*v.report);
    }
    variants.push_back(x);
  }
  j["variants"] = variants;
  j["combined"] = b.combined ? j_bound(*b.combined) : json(nullptr);
  return j;
}

json j_spectrum(const Spectrum &s)
{
  json entries = json::array();
  int counts[4] = {0, 0, 0, 0};
  for (const auto &e : s.entries)
  {
    counts[static_cast<int>(e.cls)]++;
    json x{{"re", e.pair.lambda.real()},
           {"im", e.pair.lambda.imag()},
           {"class", to_string(e.cls)},
           {"krein_sign", e.pair.krein_sign},
           {"residual", e.pair.residual},
           {"mesh_agreement", j_number(e.mesh_agreement)},
           {"phi_inf", e.pair.phi_inf},
           {"dphi_p2", e.pair.dphi_p2}};
    if (e.conjugate >= 0)
    {
      x["conjugate"] = e.conjugate;
      x["conjugate_residual"] = e.conjugate_residual;
    }
    if (!e.note.empty())
    {
      x["note"] = e.note;
    }
    entries.push_back(x);
  }
  return json{{"N", s.N},
              {"coarse_N", s.coarse_N},
              {"method", s.method},
              {"window", s.window},
              {"h_max", s.h_max},
              {"counts",
               {{"real", counts[0]},
                {"nonreal", counts[1]},
                {"exceptional", counts[2]},
                {"spurious", counts[3]}}},
              {"eigenvalues", entries}};
}

json j_verify(const VerifyStage &v, const Spectrum &s)
{
  json j;
  j["passed"] = v.passed;
  j["failures"] = v.failures;
  if (v.bounds)
  {
    json checks = json::array();
    for (const auto &c : v.bounds->checks)
    {
      checks.push_back({{"re", c.lambda.real()},
                        {"im", c.lambda.imag()},
                        {"quantity", c.quantity},
                        {"value", c.value},
                        {"bound", j_number(c.bound)},
                        {"margin", j_number(c.margin)},
                        {"passed", c.passed}});
    }
    j["bounds"] = {{"passed", v.bounds->passed}, {"checks", checks}};
  }
  else
  {
    j["bounds"] = nullptr;
  }
  json entries = json::array();
  double worst_identity = 0.0, worst_boundary = -INFINITY;
  for (const auto &e : v.entries)
  {
    const auto &lam = s.entries[static_cast<std::size_t>(e.index)].pair.lambda;
    json x{{"index", e.index},
           {"re", lam.real()},
           {"im", lam.imag()},
           {"boundary",
            {{"passed", e.boundary.passed},
             {"form_re", e.boundary.form.real()},
             {"form_im", e.boundary.form.imag()},
             {"bound", e.boundary.bound},
             {"tol", e.boundary.tol}}}};
    worst_boundary = std::max(worst_boundary, e.boundary.excess);
    if (e.identities)
    {
      x["identities"] = {{"passed", e.identities->passed},
                         {"max_rel_im", e.identities->max_rel_im},
                         {"max_rel_re", e.identities->max_rel_re}};
      worst_identity = std::max(
          {worst_identity, e.identities->max_rel_im, e.identities->max_rel_re});
    }
    if (e.norms)
    {
      json n = json::array();
      for (const auto &c : e.norms->checks)
      {
        n.push_back({{"name", c.name},
                     {"value", c.value},
                     {"bound", c.bound},
                     {"slack", c.slack},
                     {"passed", c.passed}});
      }
      x["norms"] = n;
    }
    entries.push_back(x);
  }
  j["entries"] = entries;
  j["worst_identity_mismatch"] = worst_identity;
  j["worst_boundary_excess"] = j_number(worst_boundary);
  return j;
}

std::string fmt(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string spectrum_csv(const Spectrum &s)
{
  std::ostringstream os;
  os << "re,im,class,krein_sign,residual,mesh_agreement\n";
  for (const auto &e : s.entries)
  {
    os << fmt(e.pair.lambda.real()) << ',' << fmt(e.pair.lambda.imag()) << ','
       << to_string(e.cls) << ',' << fmt(e.pair.krein_sign) << ',' << fmt(e.pair.residual)
       << ',' << fmt(e.mesh_agreement) << '\n';
  }
  return os.str();
}

std::string bounds_csv(const BoundsStage &b)
{
  std::ostringstream os;
  os << "variant,status,eps,threshold,im_bound,re_bound,exceptional_bound\n";
  auto row = [&](const std::string &name, const std::string &status, const BoundReport *r)
  {
    os << name << ',' << status;
    if (r)
    {
      os << ',' << fmt(r->eps.eps) << ',' << fmt(r->eps.threshold) << ',' << fmt(r->im_bound)
         << ',' << fmt(r->re_bound) << ',' << fmt(r->exceptional_bound);
    }
    else
    {
      os << ",,,,,";
    }
    os << '\n';
  };
  for (const auto &v : b.variants)
  {
    row(to_string(v.variant), v.status, v.report ? &*v.report : nullptr);
  }
  if (b.combined)
  {
    row("combined", "ok", &*b.combined);
  }
  return os.str();
}

std::string bounds_text(const BoundsStage &b)
{
  std::ostringstream os;
  const auto &k = b.constants;
  os << "constants: c(D) = " << fmt(k.c_D) << ", alpha = " << fmt(k.alpha)
     << ", beta = " << fmt(k.beta) << ", gamma = " << fmt(k.gamma)
     << ", delta = " << (k.delta ? fmt(*k.delta) : std::string("none")) << '\n';
  if (b.g)
  {
    os << "g: " << to_string(b.g->provenance) << ", ||g||_inf = " << fmt(b.g->g_inf_norm)
       << ", ||g'||_{p,2} = " << fmt(b.g->g_prime_p2_norm) << '\n';
  }
  else
  {
    os << "g: unavailable (" << b.g_status << ")\n";
  }
  for (const auto &v : b.variants)
  {
    os << "  " << to_string(v.variant) << ": " << v.status;
    if (v.report)
    {
      os << "  eps = " << fmt(v.report->eps.eps) << "  im <= " << fmt(v.report->im_bound)
         << "  re <= " << fmt(v.report->re_bound);
      if (std::isfinite(v.report->exceptional_bound))
      {
        os << "  exceptional <= " << fmt(v.report->exceptional_bound);
      }
    }
    else if (!v.reason.empty())
    {
      os << " (" << v.reason << ")";
    }
    os << '\n';
  }
  if (b.combined)
  {
    os << "combined: im <= " << fmt(b.combined->im_bound) << ", re <= "
       << fmt(b.combined->re_bound) << ", exceptional <= " << fmt(b.combined->exceptional_bound)
       << '\n';
  }
  return os.str();
}

std::string spectrum_text(const Spectrum &s)
{
  std::ostringstream os;
  os << "spectrum: N = " << s.N << " (coarse " << s.coarse_N << "), method " << s.method
     << ", window " << fmt(s.window) << ", " << s.entries.size() << " eigenvalues\n";
  for (const auto &e : s.entries)
  {
    if (e.cls == EigenClass::Real)
    {
      continue;
    }
    os << "  " << to_string(e.cls) << "  " << fmt(e.pair.lambda.real()) << " "
       << (e.pair.lambda.imag() < 0 ? "- " : "+ ") << fmt(std::abs(e.pair.lambda.imag()))
       << "i  agreement " << fmt(e.mesh_agreement);
    if (!e.note.empty())
    {
      os << "  (" << e.note << ")";
    }
    os << '\n';
  }
  const auto real = s.of_class(EigenClass::Real).size();
  os << "  " << real << " real eigenvalues not listed\n";
  return os.str();
}

std::string verify_text(const VerifyStage &v)
{
  std::ostringstream os;
  if (v.bounds)
  {
    for (const auto &c : v.bounds->checks)
    {
      os << "  bound " << c.quantity << " at " << fmt(c.lambda.real()) << " + "
         << fmt(c.lambda.imag()) << "i: " << fmt(c.value) << " <= " << fmt(c.bound)
         << " (margin " << fmt(c.margin) << ")" << (c.passed ? "" : "  FAILED") << '\n';
    }
  }
  for (const auto &f : v.failures)
  {
    os << "  failure: " << f << '\n';
  }
  os << "verification: " << (v.passed ? "pass" : "FAIL") << '\n';
  return os.str();
}

bool any_ok(const BoundsStage &b)
{
  for (const auto &v : b.variants)
  {
    if (v.status == "ok")
    {
      return true;
    }
  }
  return false;
}

json base_report(const ProblemConfig &cfg, const std::string &command)
{
  return json{{"command", command},
              {"name", cfg.name},
              {"config_hash", config_hash(cfg.resolved)},
              {"config", cfg.resolved}};
}

void run_variant(BoundsStage &b, BoundVariant v, const std::function<BoundReport()> &f)
{
  VariantOutcome o;
  o.variant = v;
  try
  {
    o.report = f();
    o.status = "ok";
  }
  catch (const Unsatisfiable &e)
  {
    o.status = "unsatisfiable";
    o.reason = e.what();
  }
  catch (const InvalidInput &e)
  {
    o.status = "not_applicable";
    o.reason = e.what();
  }
  b.variants.push_back(std::move(o));
}

}  // namespace

Coefficients make_coefficients(const ProblemConfig &cfg)
{
  return Coefficients(cfg.interval, cfg.p, cfg.q, cfg.w);
}

BoundsStage compute_bounds_stage(const ProblemConfig &cfg, const Coefficients &c)
{
  const Quadrature quad(cfg.settings.quadrature);
  const auto &st = cfg.settings;
  BoundsStage b;
  b.constants =
      constants_from(c_of_domain(cfg.domain) * st.debug_scale_c_d, norms(c, quad));
  const auto &bc = b.constants;
  b.turning = turning_points(c.w(), c.interval());
  if (b.turning.enumerable)
  {
    b.signs = interval_signs(c.w(), c.interval(), b.turning.points);
  }
  const EpsSearchOptions eo{st.panels, st.eps_resolution};

  if (cfg.g)
  {
    const Fn1D gp = cfg.g_prime ? *cfg.g_prime : cfg.g->derivative();
    auto g = make_admissible_g(*cfg.g, gp, GProvenance::UserSupplied, c, quad);
    auto check = validate_g(g, c);
    const double end_tol = GValidationOptions{}.endpoint_tol * std::max(1.0, g.g_inf_norm);
    const bool endpoints_bad = std::abs(g.g_a) > end_tol || std::abs(g.g_b) > end_tol;
    if (!check.passed && endpoints_bad &&
        check.violating_fraction <= GValidationOptions{}.max_violating_fraction)
    {
      g = lift_g_endpoints(*cfg.g, gp, c, quad);
      check = validate_g(g, c);
    }
    if (check.passed)
    {
      b.g = std::move(g);
    }
    else
    {
      std::ostringstream os;
      for (const auto &m : check.messages)
      {
        os << m << "; ";
      }
      b.g_status = "supplied g is not admissible: " + os.str();
    }
    b.g_check = check;
  }
  else if (b.turning.enumerable)
  {
    auto g = construct_g_ftp(b.turning.points, bc.gamma, b.signs, c, quad);
    b.g_check = validate_g(g, c);
    if (b.g_check->passed)
    {
      b.g = std::move(g);
    }
    else
    {
      b.g_status = "constructed g failed validation";
    }
  }
  else
  {
    b.g_status = "no g supplied and the turning points of w cannot be enumerated";
  }

  auto need_g = [&]() -> const AdmissibleG &
  {
    if (!b.g)
    {
      throw Unsatisfiable("no admissible g: " + b.g_status);
    }
    return *b.g;
  };
  run_variant(b, BoundVariant::GeneralG,
              [&]
              {
                const auto &g = need_g();
                const auto e = find_eps(c, g, threshold_general_g(bc), eo);
                return bounds_general_g(bc, g, e);
              });
  run_variant(b, BoundVariant::NonzeroIntegral,
              [&]
              {
                if (!bc.delta)
                {
                  throw InvalidInput("int w = 0");
                }
                const auto &g = need_g();
                const auto e = find_eps(c, g, threshold_nonzero_integral(bc), eo);
                return bounds_nonzero_integral(bc, g, e);
              });
  const bool unit_p = is_unit_function(c.p(), c.interval());
  run_variant(b, BoundVariant::TurningPoints,
              [&]
              {
                if (!unit_p)
                {
                  throw InvalidInput("p is not identically 1");
                }
                if (!b.turning.enumerable)
                {
                  throw InvalidInput("turning points cannot be enumerated");
                }
                const auto e = find_eps_abs_weight(c, threshold_turning_points(bc), eo);
                return bounds_turning_points(bc, static_cast<int>(b.turning.points.size()), e, c);
              });
  run_variant(b, BoundVariant::TurningPointsIntegral,
              [&]
              {
                if (!unit_p)
                {
                  throw InvalidInput("p is not identically 1");
                }
                if (!b.turning.enumerable)
                {
                  throw InvalidInput("turning points cannot be enumerated");
                }
                if (!bc.delta)
                {
                  throw InvalidInput("int w = 0");
                }
                const auto e = find_eps_abs_weight(c, threshold_turning_points_integral(bc), eo);
                return bounds_turning_points_integral(
                    bc, static_cast<int>(b.turning.points.size()), e, c);
              });
  std::vector<BoundReport> ok;
  for (const auto &v : b.variants)
  {
    if (v.report)
    {
      ok.push_back(*v.report);
    }
  }
  if (!ok.empty())
  {
    b.combined = best_bounds(ok);
  }
  return b;
}

Spectrum compute_spectrum(const ProblemConfig &cfg, const Coefficients &c)
{
  SolveOptions o;
  o.pencil.dense_limit = cfg.settings.dense_limit;
  o.pencil.window = cfg.settings.trust_window;
  o.quadrature = cfg.settings.quadrature;
  return mesh_converge(c, cfg.domain, cfg.settings.grid_n, o);
}

VerifyStage verify_stage(const ProblemConfig &cfg, const BoundsStage &b, const Spectrum &s)
{
  VerifyStage v;
  const double mesh_tol = cfg.settings.mesh_tol;
  if (b.combined)
  {
    v.bounds = verify_bounds(s, *b.combined, mesh_tol);
    if (!v.bounds->passed)
    {
      v.passed = false;
      v.failures.push_back("an eigenvalue violates the combined bounds");
    }
  }
  const auto probes = default_probe_nodes(*s.problem);
  for (std::size_t i = 0; i < s.entries.size(); i++)
  {
    const auto &e = s.entries[i];
    EntryChecks ec;
    ec.index = static_cast<int>(i);
    const double form = std::abs(boundary_form(e.pair.trace));
    const double tol =
        1e-6 * (1.0 + form) + s.h_max * s.h_max * std::abs(e.pair.lambda);
    ec.boundary = check_boundary_bound(e.pair.trace, b.constants.c_D, tol);
    std::ostringstream where;
    where << " at lambda = " << fmt(e.pair.lambda.real()) << " + " << fmt(e.pair.lambda.imag())
          << "i";
    if (!ec.boundary.passed)
    {
      v.passed = false;
      v.failures.push_back("boundary form: " + ec.boundary.failure + where.str());
    }
    if (e.cls == EigenClass::Nonreal || e.cls == EigenClass::Exceptional)
    {
      ec.norms = eigenfunction_norm_checks(e.pair, e.cls, b.constants, mesh_tol);
      if (!ec.norms->passed)
      {
        v.passed = false;
        v.failures.push_back("eigenfunction norm estimate violated" + where.str());
      }
    }
    if (e.cls != EigenClass::Spurious)
    {
      ec.identities = residual_identity_check(e.pair, *s.problem, probes);
      if (!ec.identities->passed)
      {
        v.passed = false;
        v.failures.push_back("energy identities mismatch" + where.str());
      }
    }
    v.entries.push_back(std::move(ec));
  }
  return v;
}

RunResult cmd_bounds(const ProblemConfig &cfg)
{
  RunResult r;
  r.command = "bounds";
  const auto c = make_coefficients(cfg);
  r.bounds = compute_bounds_stage(cfg, c);
  r.exit_code = any_ok(*r.bounds) ? 0 : 2;
  r.report = base_report(cfg, r.command);
  r.report["bounds"] = j_bounds_stage(*r.bounds);
  r.report["exit_code"] = r.exit_code;
  r.bounds_csv = bounds_csv(*r.bounds);
  r.text = bounds_text(*r.bounds);
  return r;
}

RunResult cmd_solve(const ProblemConfig &cfg)
{
  RunResult r;
  r.command = "solve";
  const auto c = make_coefficients(cfg);
  r.spectrum = compute_spectrum(cfg, c);
  r.exit_code = 0;
  r.report = base_report(cfg, r.command);
  r.report["spectrum"] = j_spectrum(*r.spectrum);
  r.report["exit_code"] = r.exit_code;
  r.spectrum_csv = spectrum_csv(*r.spectrum);
  r.text = spectrum_text(*r.spectrum);
  return r;
}

RunResult cmd_verify(const ProblemConfig &cfg)
{
  RunResult r;
  r.command = "verify";
  const auto c = make_coefficients(cfg);
  r.bounds = compute_bounds_stage(cfg, c);
  r.spectrum = compute_spectrum(cfg, c);
  r.verify = verify_stage(cfg, *r.bounds, *r.spectrum);
  if (!r.verify->passed)
  {
    r.exit_code = 1;
  }
  else
  {
    r.exit_code = any_ok(*r.bounds) ? 0 : 2;
  }
  r.report = base_report(cfg, r.command);
  r.report["bounds"] = j_bounds_stage(*r.bounds);
  r.report["spectrum"] = j_spectrum(*r.spectrum);
  r.report["verification"] = j_verify(*r.verify, *r.spectrum);
  r.report["exit_code"] = r.exit_code;
  r.bounds_csv = bounds_csv(*r.bounds);
  r.spectrum_csv = spectrum_csv(*r.spectrum);
  r.text = bounds_text(*r.bounds) + spectrum_text(*r.spectrum) + verify_text(*r.verify);
  return r;
}

void write_outputs(const RunResult &r, const std::string &dir)
{
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const char *name, const std::string &content)
  {
    // Write to a temporary name first so readers never see a partial file.
    const fs::path target = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / (std::string(".") + name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out)
      {
        throw InvalidInput("cannot write " + tmp.string());
      }
      out << content;
    }
    fs::rename(tmp, target);
  };
  write("report.json", r.report.dump(2) + "\n");
  if (r.spectrum)
  {
    write("spectrum.csv", r.spectrum_csv);
  }
  if (r.bounds)
  {
    write("bounds.csv", r.bounds_csv);
  }
}

}  // namespace isl
