// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

// inclusion-lab <scenario> [preset] [--config PATH] [--seed N] [--out DIR]

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "inclusion_lab/inclusion_lab.h"

namespace {

enum Exit { kPass = 0, kScenarioFailed = 1, kConfigError = 2, kError = 3 };

// Owns a string returned by the C API.
struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { il_string_free(p); }
};

int report(il_status status) {
  std::cerr << "inclusion-lab: " << il_last_error() << "\n";
  return status == IL_ERR_CONFIG ? kConfigError : kError;
}

// One line per criterion, then the report path and the wall-clock time.
int summarize(const std::string& text) {
  const auto summary = nlohmann::json::parse(text);
  for (const auto& c : summary["criteria"]) {
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
              << c["detail"].get<std::string>() << "\n";
  }
  std::printf("report: %s\nwall-clock: %.3f s\n", summary["report_path"].get<std::string>().c_str(),
              summary["wall_clock_seconds"].get<double>());
  return summary["pass"].get<bool>() ? kPass : kScenarioFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolution inclusions: hypothesis checks, viability, value functions"};
  app.set_version_flag("--version", std::string(il_version()));

  std::string scenario;
  std::string preset;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string dump;
  bool list = false;

  app.add_option("scenario", scenario,
                 "check-hypotheses | simulate | viability | value | hjb-suite | example-4-4");
  app.add_option("preset", preset, "heat | burgers | ball | offcenter-ball | radial | example-4-4");
  app.add_option("-c,--config", config_path, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("-s,--seed", seed, "RNG seed (overrides the config)");
  app.add_option("-o,--out", out_dir, "output directory (overrides the config)");
  app.add_option("--dump-config", dump, "print a preset (or, with --config, the normalized config) and exit")
      ->expected(0, 1)
      ->default_str("");
  app.add_flag("--list-presets", list, "print the preset names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const char* name : {"ball", "burgers", "example-4-4", "heat", "offcenter-ball", "radial"}) {
      std::cout << name << "\n";
    }
    return kPass;
  }

  std::string config_text;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    std::ostringstream s;
    s << f.rdbuf();
    config_text = s.str();
  }

  if (app.count("--dump-config") > 0) {
    OwnedString out;
    const std::string name = dump.empty() ? preset : dump;
    il_status st = IL_OK;
    if (!config_text.empty() && name.empty()) {
      st = il_normalize_config(config_text.c_str(), &out.p);
    } else if (!name.empty()) {
      st = il_preset_config(name.c_str(), &out.p);
    } else {
      std::cerr << "inclusion-lab: --dump-config needs a preset name or --config\n";
      return kConfigError;
    }
    if (st != IL_OK) return report(st);
    std::cout << out.p;
    return kPass;
  }

  if (scenario.empty()) {
    std::cerr << app.help();
    return kConfigError;
  }
  if (config_text.empty()) {
    if (preset.empty()) {
      std::cerr << "inclusion-lab: give a preset name or --config PATH\n";
      return kConfigError;
    }
    OwnedString text;
    const il_status st = il_preset_config(preset.c_str(), &text.p);
    if (st != IL_OK) return report(st);
    config_text = text.p;
  }

  OwnedString summary;
  const std::uint64_t seed_value = seed.value_or(0);
  const il_status st = il_run_scenario(config_text.c_str(), scenario.c_str(), seed ? &seed_value : nullptr,
                                       out_dir.empty() ? nullptr : out_dir.c_str(), &summary.p);
  if (st != IL_OK) return report(st);
  return summarize(summary.p);
}
