#include "panelaudit/report.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "panelaudit/errors.hpp"

namespace panelaudit::report {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

// Shortest representation that parses back to the same double; used where
// the value must survive a CSV round trip bit-for-bit.
std::string fmt_exact(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

} // namespace

json to_json(const ValidationReport &report) {
  json j;
  j["errors"] = json::array();
  for (const auto &e : report.errors)
    j["errors"].push_back({{"code", e.code}, {"message", e.message},
                           {"row", e.row}});
  j["warnings"] = json::array();
  for (const auto &w : report.warnings)
    j["warnings"].push_back({{"code", w.code}, {"message", w.message},
                             {"row", w.row}});
  j["counts"] = {{"records", report.n_records},
                 {"roster_rows", report.n_roster_rows},
                 {"departments", report.n_departments},
                 {"years", report.n_years}};
  return j;
}

json to_json(const CorrelationMatrix &m) {
  json j;
  j["labels"] = m.labels;
  j["cells"] = json::array();
  for (size_t a = 0; a < m.labels.size(); ++a) {
    json row = json::array();
    for (size_t b = 0; b < m.labels.size(); ++b) {
      if (!m.cells[a][b]) {
        row.push_back(nullptr);
        continue;
      }
      const auto &c = *m.cells[a][b];
      row.push_back({{"r", c.r}, {"p", c.p}, {"n", c.n},
                     {"stars", stats::stars(c.p)}});
    }
    j["cells"].push_back(std::move(row));
  }
  return j;
}

csv::Table to_csv(const CorrelationMatrix &m) {
  csv::Table t;
  t.header = {"component"};
  t.header.insert(t.header.end(), m.labels.begin(), m.labels.end());
  for (size_t a = 0; a < m.labels.size(); ++a) {
    std::vector<std::string> row{m.labels[a]};
    for (size_t b = 0; b < m.labels.size(); ++b) {
      if (!m.cells[a][b]) {
        row.emplace_back();
      } else {
        const auto &c = *m.cells[a][b];
        row.push_back(fmt(c.r) + stats::stars(c.p));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json to_json(const LinearFit &fit) {
  json j;
  j["coefficients"] = json::array();
  for (size_t i = 0; i < fit.column_names.size(); ++i) {
    const double se = fit.se(static_cast<int>(i));
    const double est = fit.beta(static_cast<Eigen::Index>(i));
    const double z = se > 0.0 ? est / se : 0.0;
    const double p = stats::normal_two_sided(z);
    j["coefficients"].push_back({{"name", fit.column_names[i]},
                                 {"estimate", est},
                                 {"se", se},
                                 {"z", z},
                                 {"p", p},
                                 {"stars", stats::stars(p)}});
  }
  j["dropped_columns"] = fit.dropped_columns;
  j["n"] = fit.n_obs;
  j["adj_r2"] = fit.adj_r2;
  j["cov_clipped"] = fit.cov_clipped;
  return j;
}

json to_json(const LogitFit &fit) {
  json j;
  j["coefficients"] = json::array();
  for (size_t i = 0; i < fit.column_names.size(); ++i) {
    const double se = fit.se(static_cast<int>(i));
    const double est = fit.beta(static_cast<Eigen::Index>(i));
    const double z = se > 0.0 ? est / se : 0.0;
    const double p = stats::normal_two_sided(z);
    j["coefficients"].push_back({{"name", fit.column_names[i]},
                                 {"estimate", est},
                                 {"se", se},
                                 {"z", z},
                                 {"p", p},
                                 {"stars", stats::stars(p)}});
  }
  j["n"] = fit.n_obs;
  j["pseudo_r2"] = fit.pseudo_r2;
  j["log_likelihood"] = fit.log_likelihood;
  j["iterations"] = fit.iterations;
  return j;
}

csv::Table roster_to_csv(const std::vector<EmployeeYear> &roster) {
  csv::Table t;
  t.header = {"employee_id", "year",    "department_id", "rank",
              "qual",        "license", "is_head",       "promoted"};
  for (const auto &e : roster)
    t.rows.push_back({e.employee_id, std::to_string(e.year), e.department_id,
                      std::to_string(e.rank), e.qual ? "1" : "0",
                      e.license ? "1" : "0", e.is_head ? "1" : "0",
                      e.promoted ? (*e.promoted ? "1" : "0") : ""});
  return t;
}

csv::Table ratings_to_csv(const std::vector<RatingRecord> &records) {
  csv::Table t;
  t.header = {"year", "rater_id", "ratee_id", "rating"};
  for (const auto &r : records)
    t.rows.push_back({std::to_string(r.year), r.rater_id, r.ratee_id,
                      fmt_exact(r.rating)});
  return t;
}

uint64_t fnv1a_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw make_error("FileNotReadable", path);
  uint64_t h = 14695981039346656037ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

void write_text(const fs::path &path, const std::string &content) {
  std::ofstream out(path);
  if (!out) throw make_error("FileNotWritable", path.string());
  out << content;
}

void emit(const RunConfig &cfg, const std::string &stem, const json &j,
          const csv::Table &t) {
  const fs::path dir(cfg.out_dir);
  if (cfg.write_json) write_text(dir / (stem + ".json"), j.dump(2) + "\n");
  if (cfg.write_csv) csv::write_file((dir / (stem + ".csv")).string(), t);
}

csv::Table summary_table(
    const std::vector<std::pair<std::string, stats::Summary>> &rows) {
  csv::Table t;
  t.header = {"variable", "n", "mean", "sd", "min", "q1", "median", "q3", "max"};
  for (const auto &[name, s] : rows)
    t.rows.push_back({name, std::to_string(s.n), fmt(s.mean), fmt(s.sd),
                      fmt(s.min), fmt(s.q1), fmt(s.median), fmt(s.q3),
                      fmt(s.max)});
  return t;
}

json summary_json(const std::string &name, const stats::Summary &s) {
  return {{"variable", name}, {"n", s.n},      {"mean", s.mean},
          {"sd", s.sd},       {"min", s.min},  {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3},  {"max", s.max}};
}

const char *premium_label(PremiumKind k) {
  switch (k) {
    case PremiumKind::QualPremiumPeer: return "qual_premium_peer";
    case PremiumKind::QualPremiumNonpeer: return "qual_premium_nonpeer";
    case PremiumKind::PeerDiffQualified: return "peer_diff_qualified";
    case PremiumKind::PeerDiffUnqualified: return "peer_diff_unqualified";
  }
  return "?";
}

} // namespace

void write_validation(const RunConfig &config, const ValidationReport &report) {
  fs::create_directories(config.out_dir);
  write_text(fs::path(config.out_dir) / "validation.json",
             to_json(report).dump(2) + "\n");
}

void write_analysis(const RunConfig &config, const AssessmentPanel &panel) {
  fs::create_directories(config.out_dir);

  // table1_selfgap: self-assessment gap.
  const auto gap = self_gap_table(panel, config.agg);
  {
    json j;
    j["summary"] = json::array(
        {summary_json("delta_pr_self", gap.delta),
         summary_json("pr_self", gap.pr_self),
         summary_json("pr_actual", gap.pr_actual)});
    j["rows"] = json::array();
    for (const auto &r : gap.rows)
      j["rows"].push_back({{"employee_id", r.employee_id}, {"year", r.year},
                           {"pr_self", r.pr_self}, {"pr_actual", r.pr_actual},
                           {"delta", r.delta}});
    emit(config, "table1_selfgap", j,
         summary_table({{"delta_pr_self", gap.delta},
                        {"pr_self", gap.pr_self},
                        {"pr_actual", gap.pr_actual}}));
  }

  // table2_componentcorr: component correlation matrix.
  const auto corr = component_correlation_matrix(panel, config.agg);
  emit(config, "table2_componentcorr", to_json(corr), to_csv(corr));

  // table3_strategic: strategic-rating regression.
  DesignSpec spec;
  spec.sample_filter = config.sample_filter;
  spec.small_sample_correction = config.small_sample_correction;
  const LinearFit fit = fit_strategic_model(panel, spec);
  {
    json j = to_json(fit);
    j["sample_filter"] = sample_filter_name(config.sample_filter);
    csv::Table t;
    t.header = {"name", "estimate", "se", "z", "p", "stars"};
    for (size_t i = 0; i < fit.column_names.size(); ++i) {
      const double se = fit.se(static_cast<int>(i));
      const double est = fit.beta(static_cast<Eigen::Index>(i));
      const double z = se > 0.0 ? est / se : 0.0;
      const double p = stats::normal_two_sided(z);
      t.rows.push_back({fit.column_names[i], fmt(est), fmt(se), fmt(z), fmt(p),
                        stats::stars(p)});
    }
    emit(config, "table3_strategic", j, t);
  }

  // Figure 1: the four premium/difference bars.
  {
    const auto premiums = premium_estimates(fit);
    json j = json::array();
    csv::Table t;
    t.header = {"bar", "value", "se", "z", "p"};
    for (const auto &pe : premiums) {
      j.push_back({{"bar", premium_label(pe.kind)}, {"value", pe.value},
                   {"se", pe.std_error}, {"z", pe.z}, {"p", pe.p}});
      t.rows.push_back({premium_label(pe.kind), fmt(pe.value),
                        fmt(pe.std_error), fmt(pe.z), fmt(pe.p)});
    }
    emit(config, "figure1_premiums", j, t);
  }

  // table4_promotion: promotion logits (with and without the interaction).
  const PromotionModel model = fit_promotion_model(panel, true, config.agg);
  {
    const PromotionModel model2 = fit_promotion_model(panel, false, config.agg);
    json j;
    j["with_interaction"] = to_json(model.fit);
    j["without_interaction"] = to_json(model2.fit);
    csv::Table t;
    t.header = {"model", "name", "estimate", "se", "z", "p", "stars"};
    for (const auto *m : {&model, &model2}) {
      const auto &f = m->fit;
      const std::string label = m->with_interaction ? "col1" : "col2";
      for (size_t i = 0; i < f.column_names.size(); ++i) {
        const double se = f.se(static_cast<int>(i));
        const double est = f.beta(static_cast<Eigen::Index>(i));
        const double z = se > 0.0 ? est / se : 0.0;
        const double p = stats::normal_two_sided(z);
        t.rows.push_back({label, f.column_names[i], fmt(est), fmt(se), fmt(z),
                          fmt(p), stats::stars(p)});
      }
    }
    emit(config, "table4_promotion", j, t);
  }

  // table5_deltas: counterfactual delta summaries.
  {
    json j = json::array();
    csv::Table t;
    t.header = {"scenario", "n",        "mean",     "median",
                "sd",       "pct_negative", "pct_zero", "pct_positive"};
    for (ScenarioKind kind :
         {ScenarioKind::Head, ScenarioKind::Peer, ScenarioKind::Nonpeer,
          ScenarioKind::SelfDictated}) {
      const auto deltas = simulate_deltas(panel, model, kind, config.agg);
      const auto s = delta_summary(deltas);
      j.push_back({{"scenario", scenario_name(kind)}, {"n", s.n},
                   {"mean", s.mean}, {"median", s.median}, {"sd", s.sd},
                   {"pct_negative", s.pct_negative}, {"pct_zero", s.pct_zero},
                   {"pct_positive", s.pct_positive}});
      t.rows.push_back({scenario_name(kind), std::to_string(s.n), fmt(s.mean),
                        fmt(s.median), fmt(s.sd), fmt(s.pct_negative),
                        fmt(s.pct_zero), fmt(s.pct_positive)});
    }
    emit(config, "table5_deltas", j, t);
  }

  // table6_deltacorr: qualification vs delta correlations.
  const auto dcorr = delta_correlation_matrix(panel, model, config.agg);
  emit(config, "table6_deltacorr", to_json(dcorr), to_csv(dcorr));

  // Manifest.
  {
    auto hex64 = [](uint64_t v) {
      char b[32];
      std::snprintf(b, sizeof(b), "%016llx",
                    static_cast<unsigned long long>(v));
      return std::string(b);
    };
    json j;
    j["tool"] = "panelaudit";
    j["version"] = "1.0.0";
    j["inputs"] = {
        {"roster", {{"path", config.roster_path},
                    {"fnv1a", hex64(fnv1a_file(config.roster_path))}}},
        {"ratings", {{"path", config.ratings_path},
                     {"fnv1a", hex64(fnv1a_file(config.ratings_path))}}}};
    j["config"] = {
        {"include_self_in_all", config.agg.include_self_in_all},
        {"include_head_in_all", config.agg.include_head_in_all},
        {"sample_filter", sample_filter_name(config.sample_filter)},
        {"small_sample_correction", config.small_sample_correction},
        {"formats", {{"csv", config.write_csv}, {"json", config.write_json}}}};
    write_text(fs::path(config.out_dir) / "manifest.json", j.dump(2) + "\n");
  }
}

void write_synth_files(const SynthConfig &config,
                       const std::string &roster_path,
                       const std::string &ratings_path,
                       const std::string &truth_path) {
  const SynthResult result = generate(config);
  csv::write_file(roster_path, roster_to_csv(result.panel.roster()));
  csv::write_file(ratings_path, ratings_to_csv(result.panel.records()));

  json j;
  j["seed"] = config.seed;
  j["beta"] = {{"beta0", config.beta0}, {"beta1", config.beta1},
               {"beta2", config.beta2}, {"beta3", config.beta3}};
  j["promo"] = {{"intercept", config.promo.intercept}, {"pr", config.promo.pr},
                {"qual", config.promo.qual},
                {"pr_x_qual", config.promo.pr_x_qual},
                {"license", config.promo.license}};
  j["self_inflation"] = config.self_inflation;
  j["noise_sd"] = config.noise_sd;
  j["clamp_rate"] = result.clamp_rate;
  j["ratee_effects"] = result.truth.ratee_effects;
  j["dept_effects"] = result.truth.dept_effects;
  json ye = json::object();
  for (const auto &[year, v] : result.truth.year_effects)
    ye[std::to_string(year)] = v;
  j["year_effects"] = ye;
  write_text(truth_path, j.dump(2) + "\n");
}

} // namespace panelaudit::report
