#include "panelaudit/panel.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "panelaudit/csv.hpp"
#include "panelaudit/errors.hpp"

namespace panelaudit {

const char *relation_name(Relation r) {
  switch (r) {
    case Relation::Self: return "self";
    case Relation::Head: return "head";
    case Relation::Peer: return "peer";
    case Relation::Nonpeer: return "nonpeer";
  }
  return "?";
}

namespace {

bool parse_int(const std::string &s, int &out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_double(const std::string &s, double &out) {
  if (s.empty()) return false;
  char *end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parse_bool01(const std::string &s, bool &out) {
  if (s == "0") { out = false; return true; }
  if (s == "1") { out = true; return true; }
  return false;
}

bool require_columns(const csv::Table &t,
                     const std::vector<std::string> &names,
                     ValidationReport &report) {
  bool ok = true;
  for (const auto &name : names) {
    if (t.column(name) < 0) {
      report.errors.push_back({"MissingColumn", "missing column: " + name, 0});
      ok = false;
    }
  }
  return ok;
}

} // namespace

std::vector<EmployeeYear> load_roster(const std::string &path,
                                      ValidationReport &report) {
  csv::Table t = csv::read_file(path);
  if (!require_columns(t,
                       {"employee_id", "year", "department_id", "rank", "qual",
                        "license", "is_head", "promoted"},
                       report))
    return {};
  const int c_id = t.column("employee_id"), c_year = t.column("year"),
            c_dept = t.column("department_id"), c_rank = t.column("rank"),
            c_qual = t.column("qual"), c_lic = t.column("license"),
            c_head = t.column("is_head"), c_promo = t.column("promoted");

  std::vector<EmployeeYear> out;
  std::set<std::pair<std::string, int>> seen;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto &row = t.rows[i];
    const long rowno = static_cast<long>(i) + 1;
    if (row.size() < t.header.size()) {
      report.errors.push_back({"BadRow", "too few fields", rowno});
      continue;
    }
    EmployeeYear e;
    e.employee_id = row[c_id];
    e.department_id = row[c_dept];
    bool ok = true;
    if (!parse_int(row[c_year], e.year)) {
      report.errors.push_back({"BadInteger", "column year", rowno});
      ok = false;
    }
    if (!parse_int(row[c_rank], e.rank) || e.rank < 1) {
      report.errors.push_back({"BadInteger", "column rank", rowno});
      ok = false;
    }
    for (auto [col, field, name] :
         {std::tuple{c_qual, &e.qual, "qual"}, {c_lic, &e.license, "license"},
          {c_head, &e.is_head, "is_head"}}) {
      if (!parse_bool01(row[col], *field)) {
        report.errors.push_back(
            {"BadBoolean", std::string("column ") + name, rowno});
        ok = false;
      }
    }
    if (!row[c_promo].empty()) {
      bool p;
      if (parse_bool01(row[c_promo], p)) {
        e.promoted = p;
      } else {
        report.errors.push_back({"BadBoolean", "column promoted", rowno});
        ok = false;
      }
    }
    if (!ok) continue;
    if (!seen.insert({e.employee_id, e.year}).second) {
      report.errors.push_back({"DuplicateEmployeeYear",
                               e.employee_id + "," + std::to_string(e.year),
                               rowno});
      continue;
    }
    out.push_back(std::move(e));
  }
  report.n_roster_rows = static_cast<long>(out.size());
  return out;
}

std::vector<RawRating> load_ratings(const std::string &path,
                                    ValidationReport &report) {
  csv::Table t = csv::read_file(path);
  if (!require_columns(t, {"year", "rater_id", "ratee_id", "rating"}, report))
    return {};
  const int c_year = t.column("year"), c_rater = t.column("rater_id"),
            c_ratee = t.column("ratee_id"), c_rating = t.column("rating");

  std::vector<RawRating> out;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto &row = t.rows[i];
    const long rowno = static_cast<long>(i) + 1;
    if (row.size() < t.header.size()) {
      report.errors.push_back({"BadRow", "too few fields", rowno});
      continue;
    }
    RawRating r;
    r.rater_id = row[c_rater];
    r.ratee_id = row[c_ratee];
    if (!parse_int(row[c_year], r.year)) {
      report.errors.push_back({"BadInteger", "column year", rowno});
      continue;
    }
    if (!parse_double(row[c_rating], r.rating)) {
      report.errors.push_back({"BadNumber", "column rating", rowno});
      continue;
    }
    if (r.rating < 0.0 || r.rating > 10.0) {
      report.errors.push_back(
          {"RatingOutOfRange", "rating " + row[c_rating], rowno});
      continue;
    }
    out.push_back(std::move(r));
  }
  report.n_records = static_cast<long>(out.size());
  return out;
}

AssessmentPanel::AssessmentPanel(std::vector<EmployeeYear> roster,
                                 std::vector<RatingRecord> records)
    : roster_(std::move(roster)), records_(std::move(records)) {
  for (size_t i = 0; i < roster_.size(); ++i) {
    const auto &e = roster_[i];
    roster_index_[{e.employee_id, e.year}] = i;
    by_dept_year_[{e.department_id, e.year}].push_back({e.employee_id, e.year});
  }
  for (auto &[key, people] : by_dept_year_) std::sort(people.begin(), people.end());
  for (size_t i = 0; i < records_.size(); ++i) {
    const auto &r = records_[i];
    by_ratee_[{r.ratee_id, r.year}].push_back(i);
    by_rater_[{r.rater_id, r.year}].push_back(i);
  }
  sorted_roster_.reserve(roster_.size());
  for (const auto &e : roster_) sorted_roster_.push_back(&e);
  std::sort(sorted_roster_.begin(), sorted_roster_.end(),
            [](const EmployeeYear *a, const EmployeeYear *b) {
              return std::tie(a->employee_id, a->year) <
                     std::tie(b->employee_id, b->year);
            });
}

const EmployeeYear *AssessmentPanel::find(const std::string &employee_id,
                                          int year) const {
  auto it = roster_index_.find({employee_id, year});
  return it == roster_index_.end() ? nullptr : &roster_[it->second];
}

static const std::vector<size_t> kEmptyIdx;
static const std::vector<AssessmentPanel::PersonYear> kEmptyPeople;

const std::vector<size_t> &AssessmentPanel::received_by(
    const std::string &employee_id, int year) const {
  auto it = by_ratee_.find({employee_id, year});
  return it == by_ratee_.end() ? kEmptyIdx : it->second;
}

const std::vector<size_t> &AssessmentPanel::given_by(
    const std::string &employee_id, int year) const {
  auto it = by_rater_.find({employee_id, year});
  return it == by_rater_.end() ? kEmptyIdx : it->second;
}

const std::vector<AssessmentPanel::PersonYear> &AssessmentPanel::members(
    const std::string &department_id, int year) const {
  auto it = by_dept_year_.find({department_id, year});
  return it == by_dept_year_.end() ? kEmptyPeople : it->second;
}

std::vector<std::string> AssessmentPanel::departments() const {
  std::set<std::string> s;
  for (const auto &e : roster_) s.insert(e.department_id);
  return {s.begin(), s.end()};
}

std::vector<int> AssessmentPanel::years() const {
  std::set<int> s;
  for (const auto &e : roster_) s.insert(e.year);
  return {s.begin(), s.end()};
}

std::optional<AssessmentPanel> build_panel(std::vector<EmployeeYear> roster,
                                           const std::vector<RawRating> &raw,
                                           ValidationReport &report) {
  std::map<std::pair<std::string, int>, const EmployeeYear *> index;
  std::set<std::string> depts;
  std::set<int> years;
  for (const auto &e : roster) {
    index[{e.employee_id, e.year}] = &e;
    depts.insert(e.department_id);
    years.insert(e.year);
  }

  std::vector<RatingRecord> records;
  records.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const auto &r = raw[i];
    const long rowno = static_cast<long>(i) + 1;
    const EmployeeYear *rater = nullptr, *ratee = nullptr;
    if (auto it = index.find({r.rater_id, r.year}); it != index.end())
      rater = it->second;
    if (auto it = index.find({r.ratee_id, r.year}); it != index.end())
      ratee = it->second;
    if (!rater || !ratee) {
      report.errors.push_back(
          {"UnknownEmployee",
           (!rater ? r.rater_id : r.ratee_id) + "," + std::to_string(r.year),
           rowno});
      continue;
    }
    if (rater->department_id != ratee->department_id) {
      report.errors.push_back(
          {"CrossDepartmentRating", r.rater_id + "->" + r.ratee_id, rowno});
      continue;
    }
    RatingRecord rec{r.year, r.rater_id, r.ratee_id, r.rating,
                     Relation::Nonpeer};
    if (r.rater_id == r.ratee_id) {
      rec.relation = Relation::Self;
    } else if (rater->is_head) {
      rec.relation = Relation::Head;
    } else if (rater->rank == ratee->rank) {
      rec.relation = Relation::Peer;
    }
    records.push_back(std::move(rec));
  }

  report.n_records = static_cast<long>(records.size());
  report.n_roster_rows = static_cast<long>(roster.size());
  report.n_departments = static_cast<long>(depts.size());
  report.n_years = static_cast<long>(years.size());

  // One-head-per-department check is a warning, not an error.
  for (const auto &d : depts) {
    for (int y : years) {
      int heads = 0;
      bool any = false;
      for (const auto &e : roster)
        if (e.department_id == d && e.year == y) {
          any = true;
          heads += e.is_head ? 1 : 0;
        }
      if (any && heads != 1)
        report.warnings.push_back(
            {"HeadCount", d + "," + std::to_string(y) + " has " +
                              std::to_string(heads) + " heads",
             -1});
    }
  }

  if (!report.ok()) return std::nullopt;
  return AssessmentPanel(std::move(roster), std::move(records));
}

ValidationReport validate_panel(const AssessmentPanel &panel) {
  ValidationReport report;
  std::set<std::string> depts;
  std::set<int> years;
  for (const auto *e : panel.sorted_roster()) {
    depts.insert(e->department_id);
    years.insert(e->year);
    const auto key = e->employee_id + "," + std::to_string(e->year);

    bool has_self = false;
    for (size_t idx : panel.received_by(e->employee_id, e->year))
      if (panel.records()[idx].relation == Relation::Self) has_self = true;
    if (!has_self)
      report.warnings.push_back({"NoSelfRating", "no self-rating: " + key, -1});

    bool has_peer_colleague = false;
    for (const auto &[id, yr] : panel.members(e->department_id, e->year)) {
      if (id == e->employee_id) continue;
      const EmployeeYear *other = panel.find(id, yr);
      if (other && !other->is_head && other->rank == e->rank &&
          !e->is_head)
        has_peer_colleague = true;
    }
    if (!e->is_head && !has_peer_colleague)
      report.warnings.push_back({"NoPeers", "no peers: " + key, -1});
  }
  for (const auto &d : depts) {
    for (int y : years) {
      if (panel.members(d, y).empty()) continue;
      bool head_rated = false;
      for (const auto &rec : panel.records())
        if (rec.year == y && rec.relation == Relation::Head) {
          const EmployeeYear *ratee = panel.find(rec.ratee_id, rec.year);
          if (ratee && ratee->department_id == d) head_rated = true;
        }
      if (!head_rated)
        report.warnings.push_back(
            {"NoHeadRatings", "no head ratings: " + d + "," + std::to_string(y),
             -1});
    }
  }
  report.n_records = static_cast<long>(panel.records().size());
  report.n_roster_rows = static_cast<long>(panel.roster().size());
  report.n_departments = static_cast<long>(depts.size());
  report.n_years = static_cast<long>(years.size());
  return report;
}

} // namespace panelaudit
