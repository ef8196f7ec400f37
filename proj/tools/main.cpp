#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "panelaudit/errors.hpp"
#include "panelaudit/report.hpp"

using namespace panelaudit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1; // validation / analysis failure
constexpr int kExitUsage = 2;  // I/O or usage failure

std::map<std::string, std::string> read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw make_error("FileNotReadable", path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw make_error("ConfigInvalid", "expected key=value: " + line);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

bool parse_bool(const std::string &v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw make_error("ConfigInvalid", "bad boolean: " + v);
}

SampleFilter parse_filter(const std::string &v) {
  if (v == "exclude_self") return SampleFilter::ExcludeSelf;
  if (v == "all") return SampleFilter::All;
  if (v == "exclude_self_and_head") return SampleFilter::ExcludeSelfAndHead;
  throw make_error("ConfigInvalid", "bad sample_filter: " + v);
}

void apply_formats(report::RunConfig &cfg, const std::string &formats) {
  cfg.write_csv = formats.find("csv") != std::string::npos;
  cfg.write_json = formats.find("json") != std::string::npos;
  if (!cfg.write_csv && !cfg.write_json)
    throw make_error("ConfigInvalid", "no output format selected: " + formats);
}

// Config-file values fill in whatever the command line left at default.
void apply_config_file(const std::map<std::string, std::string> &kv,
                       report::RunConfig &cfg, SynthConfig &synth,
                       std::string &format, const CLI::App &cmd) {
  auto unset = [&](const std::string &flag) {
    const auto *opt = cmd.get_option_no_throw(flag);
    return !opt || opt->count() == 0;
  };
  for (const auto &[key, value] : kv) {
    // flag-backed keys: the command line wins when the flag was given
    if (key == "roster") {
      if (unset("--roster")) cfg.roster_path = value;
    }
    else if (key == "ratings") {
      if (unset("--ratings")) cfg.ratings_path = value;
    }
    else if (key == "out") {
      if (unset("--out")) cfg.out_dir = value;
    }
    else if (key == "format") {
      if (unset("--format")) format = value;
    }
    else if (key == "seed") {
      if (unset("--seed")) synth.seed = std::stoull(value);
    }
    else if (key == "include_self_in_all")
      cfg.agg.include_self_in_all = parse_bool(value);
    else if (key == "include_head_in_all")
      cfg.agg.include_head_in_all = parse_bool(value);
    else if (key == "sample_filter") cfg.sample_filter = parse_filter(value);
    else if (key == "small_sample_correction")
      cfg.small_sample_correction = parse_bool(value);
    else if (key == "n_departments") synth.n_departments = std::stoi(value);
    else if (key == "employees_per_department")
      synth.employees_per_department = std::stoi(value);
    else if (key == "n_years") synth.n_years = std::stoi(value);
    else if (key == "n_ranks") synth.n_ranks = std::stoi(value);
    else if (key == "first_year") synth.first_year = std::stoi(value);
    else if (key == "beta0") synth.beta0 = std::stod(value);
    else if (key == "beta1") synth.beta1 = std::stod(value);
    else if (key == "beta2") synth.beta2 = std::stod(value);
    else if (key == "beta3") synth.beta3 = std::stod(value);
    else if (key == "fe_scale_ratee") synth.fe_scale_ratee = std::stod(value);
    else if (key == "fe_scale_year") synth.fe_scale_year = std::stod(value);
    else if (key == "fe_scale_dept") synth.fe_scale_dept = std::stod(value);
    else if (key == "noise_sd") synth.noise_sd = std::stod(value);
    else if (key == "qual_pass_prob_per_year")
      synth.qual_pass_prob_per_year = std::stod(value);
    else if (key == "self_inflation") synth.self_inflation = std::stod(value);
    else if (key == "license_prob") synth.license_prob = std::stod(value);
    else if (key == "promo_intercept") synth.promo.intercept = std::stod(value);
    else if (key == "promo_pr") synth.promo.pr = std::stod(value);
    else if (key == "promo_qual") synth.promo.qual = std::stod(value);
    else if (key == "promo_pr_x_qual")
      synth.promo.pr_x_qual = std::stod(value);
    else if (key == "promo_license") synth.promo.license = std::stod(value);
    else throw make_error("ConfigInvalid", "unknown config key: " + key);
  }
}

struct LoadedPanel {
  std::optional<AssessmentPanel> panel;
  ValidationReport report;
};

LoadedPanel load_and_build(const report::RunConfig &cfg) {
  LoadedPanel result;
  auto roster = load_roster(cfg.roster_path, result.report);
  auto ratings = load_ratings(cfg.ratings_path, result.report);
  if (!result.report.ok()) return result;
  result.panel = build_panel(std::move(roster), ratings, result.report);
  return result;
}

void write_error_file(const std::string &out_dir, const Error &e) {
  std::filesystem::create_directories(out_dir);
  report::json j{{"code", e.code()}, {"message", e.what()}};
  std::ofstream(std::filesystem::path(out_dir) / "error.json") << j.dump(2)
                                                               << "\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"panelaudit: bias and strategic-behavior analysis of "
               "crowdsourced performance-assessment panels"};
  app.require_subcommand(1);

  report::RunConfig cfg;
  SynthConfig synth;
  std::string config_path, format = "csv,json";
  std::string roster_out = "roster.csv", ratings_out = "ratings.csv",
              truth_out = "ground_truth.json";

  auto add_common = [&](CLI::App *cmd, bool needs_inputs) {
    if (needs_inputs) {
      cmd->add_option("--roster", cfg.roster_path, "roster CSV path");
      cmd->add_option("--ratings", cfg.ratings_path, "ratings CSV path");
    }
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--format", format, "output formats: csv,json");
    cmd->add_option("--config", config_path, "key=value config file");
    return cmd;
  };

  auto *cmd_validate = add_common(
      app.add_subcommand("validate", "validate the input panel"), true);
  auto *cmd_analyze = add_common(
      app.add_subcommand("analyze", "run the full analysis pipeline"), true);
  auto *cmd_synth = app.add_subcommand(
      "synth", "generate a synthetic panel with planted effects");
  cmd_synth->add_option("--out", cfg.out_dir, "output directory");
  cmd_synth->add_option("--seed", synth.seed, "generator seed");
  cmd_synth->add_option("--config", config_path, "key=value config file");

  CLI11_PARSE(app, argc, argv);
  CLI::App *active = app.get_subcommands().front();

  try {
    if (!config_path.empty())
      apply_config_file(read_config_file(config_path), cfg, synth, format,
                        *active);
    apply_formats(cfg, format);

    if (active == cmd_synth) {
      std::filesystem::create_directories(cfg.out_dir);
      const auto dir = std::filesystem::path(cfg.out_dir);
      report::write_synth_files(synth, (dir / roster_out).string(),
                                (dir / ratings_out).string(),
                                (dir / truth_out).string());
      return kExitOk;
    }

    if (cfg.roster_path.empty() || cfg.ratings_path.empty()) {
      std::cerr << "error: --roster and --ratings are required\n";
      return kExitUsage;
    }

    LoadedPanel loaded;
    try {
      loaded = load_and_build(cfg);
    } catch (const Error &e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage; // unreadable input
    }
    ValidationReport vr = loaded.report;
    if (loaded.panel) {
      ValidationReport diag = validate_panel(*loaded.panel);
      vr.warnings.insert(vr.warnings.end(), diag.warnings.begin(),
                         diag.warnings.end());
      vr.n_records = diag.n_records;
      vr.n_roster_rows = diag.n_roster_rows;
      vr.n_departments = diag.n_departments;
      vr.n_years = diag.n_years;
    }
    report::write_validation(cfg, vr);
    if (!loaded.panel) {
      for (const auto &err : loaded.report.errors)
        std::cerr << err.code << " (row " << err.row << "): " << err.message
                  << "\n";
      return kExitDomain;
    }

    if (active == cmd_validate) return kExitOk;

    try {
      report::write_analysis(cfg, *loaded.panel);
    } catch (const Error &e) {
      std::cerr << "error: " << e.what() << "\n";
      write_error_file(cfg.out_dir, e);
      return kExitDomain;
    }
    return kExitOk;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == "ConfigInvalid" && active == cmd_synth ? kExitDomain
                                                              : kExitUsage;
  }
}
