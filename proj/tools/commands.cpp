#include "commands.hpp"

#include "prlab/ellipticity.hpp"
#include "prlab/energy.hpp"
#include "prlab/json_util.hpp"
#include "prlab/parallel.hpp"
#include "prlab/render.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace prlab::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

const json& require(const json& in, const char* key) {
  if (!in.contains(key) || in.at(key).is_null()) throw InputError(std::string("missing input: ") + key);
  return in.at(key);
}

std::uint64_t require_seed(const json& in) {
  if (!in.contains("seed") || in.at("seed").is_null())
    throw InputError("--seed is required for stochastic modes");
  const auto& s = in.at("seed");
  if (!s.is_number_integer() || s.get<long long>() < 0) throw InputError("seed must be a nonnegative integer");
  return s.get<std::uint64_t>();
}

template <class T>
T get_or(const json& in, const char* key, T fallback) {
  return in.contains(key) && !in.at(key).is_null() ? in.at(key).get<T>() : fallback;
}

Density density_of(const json& in) {
  const std::string id = require(in, "density").get<std::string>();
  try {
    return make_density(id);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

Vec2 vec2_of(const json& in, const char* key) {
  const auto& v = require(in, key);
  if (!v.is_array() || v.size() != 2) throw InputError(std::string(key) + " must be a 2-vector");
  return vec2_from_json(v);
}

// Inline object, or {"file": path}.
json load_object(const json& v) {
  if (v.is_string() || (v.is_object() && v.contains("file") && v.size() == 1)) {
    const std::string path = v.is_string() ? v.get<std::string>() : v.at("file").get<std::string>();
    std::ifstream f(path);
    if (!f) throw InputError("cannot read " + path);
    try {
      return json::parse(f);
    } catch (const json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  return v;
}

PiecewiseAffine function_of(const json& in) { return function_from_json(load_object(require(in, "function"))); }

std::vector<FamilyPtr> families_of(const json& in) {
  if (!in.contains("families") || in.at("families").is_null()) return builtin_families();
  std::vector<FamilyPtr> out;
  for (const auto& n : in.at("families")) {
    try {
      out.push_back(family_by_name(n.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (out.empty()) throw InputError("empty family list");
  return out;
}

FalsifyOptions falsify_options(const json& in) {
  FalsifyOptions o;
  o.seed = require_seed(in);
  o.budget = get_or<long>(in, "budget", o.budget);
  o.restarts = get_or<int>(in, "restarts", o.restarts);
  o.square_side = get_or<double>(in, "square_side", o.square_side);
  o.side = get_or<std::string>(in, "plus_side", "i") == "j" ? PlusSide::kNegative : PlusSide::kPositive;
  o.parallel = get_or<bool>(in, "parallel", true);
  if (o.budget < 1) throw InputError("budget must be positive");
  if (!(o.square_side > 0.0)) throw InputError("square_side must be positive");
  return o;
}

json sample_check_json(const SampleCheck& c) {
  json w = json::array();
  for (const auto& v : c.witness) w.push_back(vec_to_json(v));
  return {{"max_violation", c.max_violation}, {"samples", c.samples}, {"witness", w}, {"tolerance", 1e-10}};
}

json quad_json(const QuadratureResult& r, double tol) {
  return {{"value", r.value}, {"error_estimate", r.error_estimate}, {"tolerance", tol}};
}

}  // namespace

json parse_vector(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == '[' || c == ']' || c == ',') c = ' ';
  std::istringstream is(s);
  json out = json::array();
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw InputError("bad number: " + tok);
    } catch (const std::logic_error&) {
      throw InputError("bad number: " + tok);
    }
  }
  return out;
}

Outcome density_check(const json& in) {
  const Density f = density_of(in);
  const std::uint64_t seed = require_seed(in);
  const int samples = get_or<int>(in, "samples", 2000);
  Outcome o;
  const auto sub = check_subadditivity(f, samples, seed);
  const auto conv = check_convexity_in_nu(f, samples, seed + 1);
  o.results = {{"density", f.id()},
               {"claimed_class", to_string(f.flags().claimed)},
               {"symmetric", f.flags().symmetric},
               {"bounded", f.flags().bounded},
               {"subadditivity", sample_check_json(sub)},
               {"convexity_in_nu", sample_check_json(conv)},
               {"symmetry_defect", check_symmetry(f, samples, seed + 2)}};
  if (get_or<bool>(in, "falsify", false)) {
    FalsifyOptions fo = falsify_options(in);
    const auto rep = bv_necessary_report(f, samples, seed, fo);
    o.results["label"] = rep.label;
  }
  return o;
}

Outcome energy_eval(const json& in) {
  const Density f = density_of(in);
  EnergyOptions eo;
  eo.tol = get_or<double>(in, "tol", eo.tol);
  PiecewiseAffine u;
  if (in.contains("function")) {
    u = function_of(in);
  } else {
    const OrientedSquare q(vec2_of(in, "nu").normalized(), get_or<double>(in, "square_side", 1.0), Point2(0.0, 0.0));
    u = make_elementary(vec2_of(in, "i"), vec2_of(in, "j"), q).affine();
  }
  const auto segs = segment_energies(u, f, u.partition().domain(), eo);
  Outcome o;
  QuadratureResult total;
  json per = json::array();
  for (const auto& s : segs) {
    total += s.result;
    per.push_back({{"a", vec_to_json(s.segment.a)},
                   {"b", vec_to_json(s.segment.b)},
                   {"normal", vec_to_json(s.segment.normal)},
                   {"energy", s.result.value},
                   {"error_estimate", s.result.error_estimate}});
  }
  o.results = {{"density", f.id()}, {"energy", quad_json(total, eo.tol)}, {"segments", per}};
  return o;
}

Outcome fields_verify(const json& in) {
  const std::string kind = get_or<std::string>(in, "family", "catalog");
  const int samples = get_or<int>(in, "samples", 200);
  std::vector<ConservativeField> fields;
  std::uint64_t seed = 0;
  if (kind == "catalog") {
    fields = catalog_fields();
    seed = get_or<std::uint64_t>(in, "seed", 1);
  } else {
    seed = require_seed(in);
    try {
      fields = random_family(kind, get_or<int>(in, "n", 20), seed).fields;
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  Outcome o;
  json rows = json::array();
  bool all = true;
  double worst = 0.0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto c = check_conservative(fields[k], samples, seed + k);
    all = all && c.pass;
    worst = std::max({worst, c.max_asymmetry, c.max_potential_residual});
    rows.push_back({{"name", fields[k].name()},
                    {"params", fields[k].params()},
                    {"max_asymmetry", c.max_asymmetry},
                    {"max_potential_residual", c.max_potential_residual},
                    {"max_analytic_jacobian_error", c.max_analytic_jacobian_error},
                    {"pass", c.pass}});
  }
  o.results = {{"family", kind}, {"fields", rows}, {"all_pass", all}, {"worst_residual", worst}, {"tolerance", 1e-6}};
  return o;
}

Outcome ellipticity_falsify(const json& in) {
  const Density f = density_of(in);
  const auto opt = falsify_options(in);
  const Vec2 i = vec2_of(in, "i"), j = vec2_of(in, "j"), nu = vec2_of(in, "nu");
  if (i == j) throw InputError("i and j must differ");
  if (!(nu.norm() > 0.0)) throw InputError("nu must be nonzero");
  Outcome o;
  o.results = to_json(falsify(f, i, j, nu, families_of(in), opt));
  o.results["tolerances"] = {{"search_tol", opt.search_tol}, {"certify_tol", opt.certify_tol}};
  return o;
}

Outcome relax_estimate(const json& in) {
  const Density f = density_of(in);
  const auto opt = falsify_options(in);
  const Vec2 i = vec2_of(in, "i"), j = vec2_of(in, "j"), nu = vec2_of(in, "nu");
  if (i == j) throw InputError("i and j must differ");
  const auto r = relaxation_estimate(f, i, j, nu, families_of(in), opt);
  Outcome o;
  o.results = {{"estimate", r.value},
               {"density_value", r.verdict.reference},
               {"verdict", to_json(r.verdict)},
               {"tolerance", r.verdict.error_estimate}};
  return o;
}

namespace {

struct Ce1Parts {
  double parallel = 0.0, perp = 0.0, total = 0.0, error = 0.0;
};

Ce1Parts split_energy(const PiecewiseRigid& v, const Density& f) {
  Ce1Parts p;
  for (const auto& s : segment_energies(v, f, v.partition().domain())) {
    (std::abs(s.segment.normal.y()) > 0.5 ? p.parallel : p.perp) += s.result.value;
    p.total += s.result.value;
    p.error += s.result.error_estimate;
  }
  return p;
}

json verdict_block(const Density& f, double lambda, const json& in) {
  FalsifyOptions opt = falsify_options(in);
  opt.square_side = 6.0;
  opt.side = PlusSide::kNegative;
  const auto v = falsify(f, {0.0, 0.0}, {2.0 * lambda, 2.0 * lambda}, {0.0, 1.0}, builtin_families(), opt);
  json j = to_json(v);
  j["margin_unnormalized"] = v.margin * opt.square_side;
  return j;
}

}  // namespace

Outcome repro(const json& in, int which) {
  const double lambda = get_or<double>(in, "lambda", 1.0);
  const double eps = get_or<double>(in, "eps", which == 1 ? 0.01 : 1e-4);
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(eps > 0.0) || (which == 2 && !(eps < 1.0))) throw InputError("eps out of range");
  Outcome o;
  if (which == 1) {
    const Density f = density_aniso_normal(eps);
    const auto v = counterexample1_competitor(lambda);
    const auto parts = split_energy(v, f);
    const double straight = surface_energy(counterexample_reference(lambda), f).value;
    o.results = {{"density", f.id()},
                 {"lambda", lambda},
                 {"eps", eps},
                 {"J_parallel", {{"value", parts.parallel}, {"expected", (8.0 * std::sqrt(2.0) + 4.0) * lambda},
                                 {"tolerance", 1e-8}}},
                 {"J_perp", parts.perp},
                 {"competitor_energy", quad_json({parts.total, parts.error, 0}, 1e-10)},
                 {"straight_energy", {{"value", straight}, {"expected", 12.0 * std::sqrt(2.0) * lambda},
                                      {"tolerance", 1e-10}}},
                 {"competitor", to_json(v.affine())}};
    o.results["verdict"] = verdict_block(f, lambda, in);
  } else {
    const Density f = density_aniso_jump(eps);
    const auto v = counterexample2_competitor(lambda, eps);
    const double delta = std::pow(eps, 0.25);
    double bottom = 0.0, top = 0.0, outer = 0.0, perp = 0.0, total = 0.0, err = 0.0;
    for (const auto& s : segment_energies(v, f, v.partition().domain())) {
      const Point2 m = s.segment.point(0.5 * s.segment.length);
      const double e = s.result.value;
      total += e;
      err += s.result.error_estimate;
      if (std::abs(s.segment.normal.y()) < 0.5)
        perp += e;
      else if (std::abs(m.x()) > 1.0)
        outer += e;
      else
        (m.y() < 0.0 ? bottom : top) += e;
    }
    const double straight = surface_energy(counterexample_reference(lambda), f).value;
    o.results = {{"density", f.id()},
                 {"lambda", lambda},
                 {"eps", eps},
                 {"delta", delta},
                 {"inner_bottom", bottom},
                 {"inner_top", top},
                 {"outer_parallel", {{"value", outer}, {"expected", 8.0 * std::sqrt(1.0 + eps) * lambda},
                                     {"tolerance", 1e-10}}},
                 {"perp", perp},
                 {"competitor_energy", quad_json({total, err, 0}, 1e-10)},
                 {"straight_energy", straight},
                 {"below_straight", total < straight},
                 {"competitor", to_json(v.affine())}};
    o.results["verdict"] = verdict_block(f, lambda, in);
  }
  if (in.contains("sweep")) {
    std::ostringstream csv;
    csv.precision(12);
    csv << "eps,competitor_energy,straight_energy,normalized_gap\n";
    for (const auto& e : in.at("sweep")) {
      const double ee = e.get<double>();
      if (!(ee > 0.0) || (which == 2 && !(ee < 1.0))) throw InputError("sweep eps out of range");
      const Density f = which == 1 ? density_aniso_normal(ee) : density_aniso_jump(ee);
      const auto v = which == 1 ? counterexample1_competitor(lambda) : counterexample2_competitor(lambda, ee);
      const double c = surface_energy(v, f).value, s = surface_energy(counterexample_reference(lambda), f).value;
      csv << ee << ',' << c << ',' << s << ',' << (s - c) / 6.0 << '\n';
    }
    o.csv = csv.str();
  }
  if (o.results["verdict"]["status"] != "VIOLATION") o.exit_code = 2;
  return o;
}

Outcome ibp_check(const json& in) {
  const PiecewiseAffine u = function_of(in);
  ConservativeField g;
  try {
    g = field_from_json(load_object(require(in, "field")));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const TestFunction phi(polygon_from_json(load_object(require(in, "region"))), get_or<int>(in, "power", 2));
  IbpOptions io;
  io.tol = get_or<double>(in, "tol", io.tol);
  const auto a = integration_by_parts(u, g, phi, io), b = integration_by_parts(u, g, phi, io.doubled());
  auto rep = [](const IbpReport& r) {
    return json{{"jump", r.jump_term},       {"bulk", r.bulk_term},
                {"flux", r.flux_term},       {"residual", r.residual},
                {"error_estimate", r.error_estimate}, {"unbounded_field", r.unbounded_field}};
  };
  Outcome o;
  o.results = {{"default", rep(a)}, {"doubled", rep(b)}, {"tolerance", io.tol}};
  return o;
}

Outcome render(const json& in) {
  SvgStyle st;
  st.width = get_or<int>(in, "width", st.width);
  st.normals = get_or<bool>(in, "normals", st.normals);
  PiecewiseAffine u;
  const std::string preset = get_or<std::string>(in, "preset", "");
  if (preset == "ce1")
    u = counterexample1_competitor(get_or<double>(in, "lambda", 1.0)).affine();
  else if (preset == "ce2")
    u = counterexample2_competitor(get_or<double>(in, "lambda", 1.0), get_or<double>(in, "eps", 1e-4)).affine();
  else if (!preset.empty())
    throw InputError("unknown preset: " + preset);
  else
    u = function_of(in);
  Outcome o;
  o.svg = render_svg(u, st);
  o.results = {{"cells", u.partition().num_cells()}, {"jump_segments", jump_segments(u).size()}};
  return o;
}

Outcome run_mode(const json& in) {
  const std::string mode = require(in, "mode").get<std::string>();
  if (mode == "eval") return energy_eval(in);
  if (mode == "falsify") return ellipticity_falsify(in);
  if (mode == "relax") return relax_estimate(in);
  if (mode == "fields-verify") return fields_verify(in);
  if (mode == "repro-ce1") return repro(in, 1);
  if (mode == "repro-ce2") return repro(in, 2);
  if (mode == "ibp-check") return ibp_check(in);
  if (mode == "density-check") return density_check(in);
  if (mode == "render") return render(in);
  throw InputError("unknown mode: " + mode);
}

json make_report(const std::string& mode, const json& in, const Outcome& out, double seconds) {
  return {{"tool", "prlab"},
          {"version", kVersion},
          {"mode", mode},
          {"inputs", in},
          {"results", out.results},
          {"threads", thread_count()},
          {"wall_time_s", seconds},
          {"exit_code", out.exit_code}};
}

}  // namespace prlab::cli
