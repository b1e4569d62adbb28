#pragma once

// Command layer shared by the subcommands and the scenario runner. Every
// command takes its inputs as a JSON object and returns a report.

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace prlab::cli {

/// Bad or missing user input; mapped to exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  nlohmann::json results;
  int exit_code = 0;
  std::string csv;  // sweep tables only
  std::string svg;  // render only
};

Outcome density_check(const nlohmann::json& in);
Outcome energy_eval(const nlohmann::json& in);
Outcome fields_verify(const nlohmann::json& in);
Outcome ellipticity_falsify(const nlohmann::json& in);
Outcome relax_estimate(const nlohmann::json& in);
Outcome repro(const nlohmann::json& in, int which);
Outcome ibp_check(const nlohmann::json& in);
Outcome render(const nlohmann::json& in);

/// Dispatches on in["mode"]: eval, falsify, relax, fields-verify, repro-ce1,
/// repro-ce2, ibp-check, density-check, render.
Outcome run_mode(const nlohmann::json& in);

/// Wraps results with the input echo, version and wall time.
nlohmann::json make_report(const std::string& mode, const nlohmann::json& in, const Outcome& out, double seconds);

/// "a,b" or "[a, b]" into a JSON array of numbers.
nlohmann::json parse_vector(const std::string& text);

}  // namespace prlab::cli
