#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace panelaudit {

struct EmployeeYear {
  std::string employee_id;
  int year = 0;
  std::string department_id;
  int rank = 0;
  bool qual = false;
  bool license = false;
  bool is_head = false;
  std::optional<bool> promoted;
};

enum class Relation { Self, Head, Peer, Nonpeer };

const char *relation_name(Relation r);

struct RatingRecord {
  int year = 0;
  std::string rater_id;
  std::string ratee_id;
  double rating = 0.0; // 0..10 scale
  Relation relation = Relation::Nonpeer;
};

struct RawRating {
  int year = 0;
  std::string rater_id;
  std::string ratee_id;
  double rating = 0.0;
};

struct Issue {
  std::string code;
  std::string message;
  long row = -1; // 1-based data row in the source file, -1 if not file-bound
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  long n_records = 0;
  long n_roster_rows = 0;
  long n_departments = 0;
  long n_years = 0;

  bool ok() const { return errors.empty(); }
};

// Immutable after construction. All analyses read from here.
class AssessmentPanel {
public:
  using PersonYear = std::pair<std::string, int>;

  AssessmentPanel(std::vector<EmployeeYear> roster,
                  std::vector<RatingRecord> records);

  const std::vector<EmployeeYear> &roster() const { return roster_; }
  const std::vector<RatingRecord> &records() const { return records_; }

  const EmployeeYear *find(const std::string &employee_id, int year) const;

  // Record indexes (positions into records()).
  const std::vector<size_t> &received_by(const std::string &employee_id,
                                         int year) const;
  const std::vector<size_t> &given_by(const std::string &employee_id,
                                      int year) const;
  const std::vector<PersonYear> &members(const std::string &department_id,
                                         int year) const;

  std::vector<std::string> departments() const;
  std::vector<int> years() const;

  // Roster rows sorted by (employee_id, year); canonical iteration order.
  const std::vector<const EmployeeYear *> &sorted_roster() const {
    return sorted_roster_;
  }

private:
  std::vector<EmployeeYear> roster_;
  std::vector<RatingRecord> records_;
  std::map<PersonYear, size_t> roster_index_;
  std::map<PersonYear, std::vector<size_t>> by_ratee_;
  std::map<PersonYear, std::vector<size_t>> by_rater_;
  std::map<std::pair<std::string, int>, std::vector<PersonYear>> by_dept_year_;
  std::vector<const EmployeeYear *> sorted_roster_;
};

struct LoadResult {
  std::vector<EmployeeYear> roster;
  std::vector<RawRating> ratings;
  ValidationReport report;
};

std::vector<EmployeeYear> load_roster(const std::string &path,
                                      ValidationReport &report);
std::vector<RawRating> load_ratings(const std::string &path,
                                    ValidationReport &report);

// Derives relations (Self > Head > Peer > Nonpeer precedence) and rejects
// records that do not resolve within a department. On error the panel is
// absent and the report explains why.
std::optional<AssessmentPanel> build_panel(std::vector<EmployeeYear> roster,
                                           const std::vector<RawRating> &raw,
                                           ValidationReport &report);

// Completeness diagnostics: missing self-ratings, headless departments,
// employees with no peers. Never fails.
ValidationReport validate_panel(const AssessmentPanel &panel);

} // namespace panelaudit
