// pseudoliouville <command> --scene <file> [--out <dir>] [--seed <u64>]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plv/cli.hpp"

namespace {

int fail(const plv::cli::Json& error, int code) {
  std::cerr << plv::cli::to_text(error);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural systems with quadratic integrals on (+,-) surfaces"};
  std::string command, scene, out = ".";
  std::uint64_t seed = 0;
  app.add_option("command", command, "classify | bracket-check | geodesic | equiv-check | quadrature | quantum-check")
      ->required()
      ->check(CLI::IsMember(plv::cli::commands()));
  app.add_option("--scene", scene, "scene file (JSON)")->required();
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the scene's");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    plv::cli::Json err;
    err["error"]["type"] = "usage";
    err["error"]["message"] = e.what();
    return fail(err, 2);
  }

  try {
    const auto summary = plv::cli::run(command, scene, out,
                                       seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt);
    (void)summary;
    return 0;
  } catch (const std::exception& e) {
    const auto [err, code] = plv::cli::describe_error(e);
    return fail(err, code);
  }
}
