#pragma once

#include <cstddef>
#include <vector>

namespace panelaudit::stats {

enum class TieRule { MidRank };

// Percentile rank in [0,1]: 1 for the highest value, 0 for the lowest,
// mid-rank averaging for ties, 0.5 for a singleton group.
double percentile_rank(const std::vector<double> &values, size_t index,
                       TieRule rule = TieRule::MidRank);

struct Correlation {
  double r = 0.0;
  double p = 1.0;
  size_t n = 0;
};

// Pearson r with a two-sided p-value from the t distribution with n-2 df.
// Throws TooFewPoints (n < 3) or ZeroVariance.
Correlation pearson(const std::vector<double> &x, const std::vector<double> &y);

struct Summary {
  size_t n = 0;
  double mean = 0.0;
  double sd = 0.0; // sample SD (n-1 denominator)
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

Summary summarize(std::vector<double> values);

// Linearly interpolated quantile of sorted data (type-7 rule).
double quantile_sorted(const std::vector<double> &sorted, double q);

double mean(const std::vector<double> &values);

// Two-sided p-values.
double student_t_two_sided(double t, double df);
double normal_two_sided(double z);

// Significance stars at 10/5/1%: "", "*", "**", "***".
const char *stars(double p);

} // namespace panelaudit::stats
