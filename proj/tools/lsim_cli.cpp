// lsim <scenario> [--config FILE] [--set key=value ...] [--out DIR] [--svg]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical or
// regime error (and I/O failures).

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lsim/io/config.hpp"
#include "lsim/io/scenarios.hpp"

namespace {

std::string key_reference() {
  std::string s = "\nConfiguration keys (default):\n";
  for (const auto& k : lsim::io::key_registry()) {
    s += "  " + std::string(k.name) + " (" + std::string(k.fallback) + ")  " + std::string(k.doc);
    if (!k.choices.empty()) {
      s += " [";
      for (std::size_t i = 0; i < k.choices.size(); ++i)
        s += (i ? "|" : "") + std::string(k.choices[i]);
      s += "]";
    }
    s += "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EIT slow-light and delayed-routing simulations"};
  std::string scenario;
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool svg = false;
  bool list_keys = false;
  app.add_option("scenario", scenario, "one of: " + lsim::io::scenario_list());
  app.add_option("--config", config_file, "key = value file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override, key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory (overrides out_dir)");
  app.add_flag("--svg", svg, "also write SVG plots");
  app.add_flag("--keys", list_keys, "list configuration keys and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list_keys) {
    std::cout << key_reference();
    return 0;
  }
  if (!lsim::io::is_scenario(scenario)) {
    std::cerr << "usage error: "
              << (scenario.empty() ? std::string("no scenario given")
                                   : "unknown scenario '" + scenario + "'")
              << "\nvalid scenarios: " << lsim::io::scenario_list() << "\n";
    return 2;
  }

  try {
    if (!out_dir.empty()) overrides.push_back("out_dir=" + out_dir);
    if (svg) overrides.push_back("svg=true");
    const auto cfg = lsim::io::load_config(
        config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file),
        overrides);
    const auto res = lsim::io::run_scenario(scenario, cfg);
    for (const auto& [k, v] : res.summary) std::cout << k << " = " << v << "\n";
    std::cout << "wrote " << res.files.size() << " files to " << cfg.text("out_dir") << "\n";
    return 0;
  } catch (const lsim::Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == lsim::ErrorKind::config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
