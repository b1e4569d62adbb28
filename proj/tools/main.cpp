#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

using nlohmann::json;
namespace cli = prlab::cli;

namespace {

struct Common {
  std::string out;
  std::string csv;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw cli::InputError("cannot write " + path);
  f << text;
}

int execute(const std::string& mode, const json& in, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  cli::Outcome out = cli::run_mode(in);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.svg.empty()) {
    write_text(c.out, out.svg);
    return out.exit_code;
  }
  write_text(c.out, cli::make_report(mode, in, out, dt).dump(2) + "\n");
  if (!out.csv.empty()) write_text(c.csv.empty() ? std::string("-") : c.csv, out.csv);
  return out.exit_code;
}

void put_vector(json& in, const char* key, const std::string& text) {
  if (!text.empty()) in[key] = cli::parse_vector(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise rigid surface energies: evaluation, field certificates and ellipticity search"};
  app.require_subcommand(1);
  Common common;
  json in;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string vi, vj, vnu;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out,-o", common.out, "Output path (default stdout)");
  };
  auto add_triple = [&](CLI::App* sub) {
    sub->add_option("--i", vi, "First trace value, e.g. 0,0")->required();
    sub->add_option("--j", vj, "Second trace value")->required();
    sub->add_option("--nu", vnu, "Normal")->required();
  };

  std::string density;
  int samples = 2000, n = 20, budget = 2000, restarts = 8, width = 640;
  double tol = 1e-10, lambda = 1.0, eps = -1.0, side = 1.0;
  std::string function_path, family = "catalog", plus_side = "i", preset;
  std::vector<std::string> families;
  std::vector<double> sweep;
  bool with_falsify = false, serial = false;

  // density check
  auto* dens = app.add_subcommand("density", "Density catalog checks");
  dens->require_subcommand(1);
  auto* dcheck = dens->add_subcommand("check", "Sampled subadditivity, ν-convexity and symmetry");
  dcheck->add_option("--density,-d", density, "Catalog id")->required();
  dcheck->add_option("--samples", samples);
  dcheck->add_option("--seed", seed);
  dcheck->add_flag("--falsify", with_falsify, "Also run the BD falsifier on the canonical triple");
  add_common(dcheck);
  dcheck->callback([&] { mode = "density-check"; });

  // energy eval
  auto* en = app.add_subcommand("energy", "Surface energies");
  en->require_subcommand(1);
  auto* eval = en->add_subcommand("eval", "Energy of a function file or of an elementary jump");
  eval->add_option("--density,-d", density)->required();
  eval->add_option("--function,-f", function_path, "Function JSON");
  eval->add_option("--i", vi);
  eval->add_option("--j", vj);
  eval->add_option("--nu", vnu);
  eval->add_option("--side", side, "Square side for the elementary jump");
  eval->add_option("--tol", tol);
  add_common(eval);
  eval->callback([&] { mode = "eval"; });

  // fields verify
  auto* fl = app.add_subcommand("fields", "Conservative vector fields");
  fl->require_subcommand(1);
  auto* verify = fl->add_subcommand("verify", "Curl and potential residuals");
  verify->add_option("--family", family, "catalog|gbmc|dalmot|normal|biconvex|prototype");
  verify->add_option("--n", n);
  verify->add_option("--samples", samples);
  verify->add_option("--seed", seed);
  add_common(verify);
  verify->callback([&] { mode = "fields-verify"; });

  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--density,-d", density)->required();
    add_triple(sub);
    sub->add_option("--budget", budget, "Objective evaluations per family");
    sub->add_option("--restarts", restarts);
    sub->add_option("--seed", seed);
    sub->add_option("--families", families, "Subset of square-insert, rect-insert, checkerboard, nested-squares")->delimiter(',');
    sub->add_option("--square-side", side);
    sub->add_option("--plus-side", plus_side, "Which value sits on the +ν side: i or j");
    sub->add_flag("--serial", serial);
    add_common(sub);
  };
  auto* ell = app.add_subcommand("ellipticity", "BD-ellipticity search");
  ell->require_subcommand(1);
  auto* fals = ell->add_subcommand("falsify", "Search competitor families for a violation");
  add_search(fals);
  fals->callback([&] { mode = "falsify"; });

  auto* rel = app.add_subcommand("relax", "Relaxed density");
  rel->require_subcommand(1);
  auto* est = rel->add_subcommand("estimate", "Upper bound from the competitor search");
  add_search(est);
  est->callback([&] { mode = "relax"; });

  auto* rep = app.add_subcommand("repro", "Reproduce the two counterexamples");
  rep->require_subcommand(1);
  for (const char* which : {"ce1", "ce2"}) {
    auto* r = rep->add_subcommand(which, std::string("Counterexample ") + which);
    r->add_option("--lambda", lambda);
    r->add_option("--eps", eps);
    r->add_option("--budget", budget);
    r->add_option("--seed", seed);
    r->add_option("--sweep", sweep, "ε values for a CSV table")->delimiter(',');
    r->add_option("--csv", common.csv, "CSV path for --sweep");
    add_common(r);
    const std::string m = std::string("repro-") + which;
    r->callback([&, m] { mode = m; });
  }

  auto* ren = app.add_subcommand("render", "SVG of a function");
  ren->add_option("--function,-f", function_path);
  ren->add_option("--preset", preset, "ce1 or ce2");
  ren->add_option("--width", width);
  add_common(ren);
  ren->callback([&] { mode = "render"; });

  std::string scenario;
  auto* run = app.add_subcommand("run", "Execute a scenario file");
  run->add_option("scenario", scenario, "Scenario JSON")->required();
  run->add_option("--csv", common.csv);
  add_common(run);
  run->callback([&] { mode = "run"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (mode == "run") {
      std::ifstream f(scenario);
      if (!f) throw cli::InputError("cannot read " + scenario);
      json s;
      try {
        s = json::parse(f);
      } catch (const json::parse_error& e) {
        throw cli::InputError(std::string("malformed scenario: ") + e.what());
      }
      if (!s.is_object()) throw cli::InputError("scenario must be a JSON object");
      if (common.out.empty() && s.contains("output")) common.out = s.at("output").get<std::string>();
      if (common.csv.empty() && s.contains("csv")) common.csv = s.at("csv").get<std::string>();
      if (!s.contains("mode")) throw cli::InputError("scenario needs a mode");
      return execute(s.at("mode").get<std::string>(), s, common);
    }
    in["mode"] = mode;
    if (!density.empty()) in["density"] = density;
    if (seed) in["seed"] = *seed;
    put_vector(in, "i", vi);
    put_vector(in, "j", vj);
    put_vector(in, "nu", vnu);
    if (!function_path.empty()) in["function"] = function_path;
    if (mode == "density-check") {
      in["samples"] = samples;
      in["falsify"] = with_falsify;
    } else if (mode == "eval") {
      in["tol"] = tol;
      in["square_side"] = side;
    } else if (mode == "fields-verify") {
      in["family"] = family;
      in["n"] = n;
      in["samples"] = samples;
    } else if (mode == "falsify" || mode == "relax") {
      in["budget"] = budget;
      in["restarts"] = restarts;
      in["square_side"] = side;
      in["plus_side"] = plus_side;
      in["parallel"] = !serial;
      if (!families.empty()) in["families"] = families;
    } else if (mode.rfind("repro", 0) == 0) {
      in["lambda"] = lambda;
      if (eps > 0.0) in["eps"] = eps;
      in["budget"] = budget;
      if (!sweep.empty()) in["sweep"] = sweep;
    } else if (mode == "render") {
      in["width"] = width;
      if (!preset.empty()) in["preset"] = preset;
    }
    return execute(mode, in, common);
  } catch (const cli::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
