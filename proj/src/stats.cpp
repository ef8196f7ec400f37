#include "panelaudit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "panelaudit/errors.hpp"

namespace panelaudit::stats {

double percentile_rank(const std::vector<double> &values, size_t index,
                       TieRule) {
  if (values.empty()) throw make_error("EmptyInput", "percentile_rank");
  if (index >= values.size())
    throw make_error("BadIndex", "percentile_rank index out of range");
  const size_t n = values.size();
  if (n == 1) return 0.5; // degenerate group convention
  const double v = values[index];
  size_t greater = 0, equal = 0;
  for (double x : values) {
    if (x > v) ++greater;
    else if (x == v) ++equal;
  }
  // Descending mid-rank: ties share the average of their rank positions.
  const double midrank = static_cast<double>(greater) + (equal + 1.0) / 2.0;
  return (static_cast<double>(n) - midrank) / (static_cast<double>(n) - 1.0);
}

namespace {

// Regularized incomplete beta via Lentz continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14, kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

} // namespace

double student_t_two_sided(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return ibeta(df / 2.0, 0.5, x);
}

double normal_two_sided(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

const char *stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

Correlation pearson(const std::vector<double> &x,
                    const std::vector<double> &y) {
  if (x.size() != y.size())
    throw make_error("LengthMismatch", "pearson inputs differ in length");
  const size_t n = x.size();
  if (n < 3) throw make_error("TooFewPoints", "pearson needs n >= 3");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw make_error("ZeroVariance", "pearson input has zero variance");
  Correlation c;
  c.n = n;
  c.r = sxy / std::sqrt(sxx * syy);
  c.r = std::clamp(c.r, -1.0, 1.0);
  const double df = static_cast<double>(n) - 2.0;
  if (std::fabs(c.r) >= 1.0) {
    c.p = 0.0;
  } else {
    const double t = c.r * std::sqrt(df / (1.0 - c.r * c.r));
    c.p = student_t_two_sided(t, df);
  }
  return c;
}

double mean(const std::vector<double> &values) {
  double s = 0.0;
  for (double v : values) s += v;
  return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

double quantile_sorted(const std::vector<double> &sorted, double q) {
  if (sorted.empty()) throw make_error("EmptyInput", "quantile of empty list");
  if (sorted.size() == 1) return sorted[0];
  const double h = q * (static_cast<double>(sorted.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw make_error("EmptyInput", "summarize");
  Summary s;
  s.n = values.size();
  s.mean = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / (static_cast<double>(s.n) - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  return s;
}

} // namespace panelaudit::stats
