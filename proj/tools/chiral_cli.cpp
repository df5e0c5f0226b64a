#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chiral/chiral.hpp"

namespace {

chiral::ExperimentConfig load(const std::string& path, chiral::ExperimentKind kind, bool keep_kind) {
  chiral::ExperimentConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw chiral::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    cfg = chiral::parse_config(text.str());
  }
  if (!keep_kind) {
    cfg.kind = kind;
    if (kind == chiral::ExperimentKind::single_particle && path.empty()) {
      cfg.tol = 1e-12;
      cfg.cases = 20;
      cfg.chi = {{1.0, 1, -chiral::kPi / 2}};
    }
    if (kind == chiral::ExperimentKind::fock && path.empty()) {
      cfg.tol = 1e-8;
      cfg.chi = {{0.5, 1, -chiral::kPi / 2}};
    }
    if (kind == chiral::ExperimentKind::hs_check && path.empty()) cfg.tol = 1e-10;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chiral anomaly laboratory: finite-mode checks of the 1+1D Dirac current"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  double tol = 0.0;
  std::uint64_t seed = 0;
  std::string axis;
  std::vector<double> values;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Config file (INI-style)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory for CSV and JSON reports");
    sub->add_option("--tol", tol, "Override the pass/fail tolerance");
    sub->add_option("--seed", seed, "Override the RNG seed");
  };

  struct Sub {
    const char* name;
    chiral::ExperimentKind kind;
    const char* help;
  };
  const Sub subs[] = {
      {"single-particle", chiral::ExperimentKind::single_particle, "Gauge invariance of the one-particle current"},
      {"anomaly", chiral::ExperimentKind::anomaly, "Anomaly trace against the closed form"},
      {"fock", chiral::ExperimentKind::fock, "Exact Fock-space conjugation identity"},
      {"hs-check", chiral::ExperimentKind::hs_check, "Hilbert-Schmidt norms of the off-diagonal blocks"},
  };
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help));
  auto* sw = app.add_subcommand("sweep", "Sweep N, amplitude or L for the configured experiment");
  add_common(sw);
  sw->add_option("--axis", axis, "Sweep axis: N, amplitude or L");
  sw->add_option("--values", values, "Ascending sweep values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    chiral::ExperimentConfig cfg;
    chiral::Report report;
    std::string stem;
    if (name == "sweep") {
      cfg = load(config_path, chiral::ExperimentKind::anomaly, !config_path.empty());
      if (!axis.empty() || !values.empty()) {
        chiral::SweepSpec s = cfg.sweep.value_or(chiral::SweepSpec{});
        if (!axis.empty()) s.axis = chiral::parse_axis(axis);
        if (!values.empty()) s.values = values;
        cfg.sweep = s;
      }
    } else {
      for (const auto& s : subs) {
        if (name == s.name) cfg = load(config_path, s.kind, false);
      }
    }
    if (chosen->count("--tol")) cfg.tol = tol;
    if (chosen->count("--seed")) cfg.seed = seed;
    if (chosen->count("--out")) cfg.out = out_dir;
    chiral::validate(cfg);

    if (name == "sweep") {
      report = chiral::sweep(cfg);
      stem = chiral::to_string(cfg.kind) + "_sweep_" + chiral::to_string(cfg.sweep->axis);
    } else {
      report = chiral::run(cfg);
      stem = chiral::to_string(cfg.kind);
    }
    const auto csv = chiral::write_report(report, cfg.out, stem);
    std::cout << chiral::to_csv(report);
    std::cerr << "wrote " << csv.string() << "\n";
    return report.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
