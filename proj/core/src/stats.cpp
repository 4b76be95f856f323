#include "wxaug/stats.hpp"

#include <cmath>
#include <limits>

#include "wxaug/errors.hpp"

namespace wxaug {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

MeanStd mean_std(std::span<const double> samples) {
  if (samples.size() < 2) throw ConfigError("mean_std: need at least two samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("incomplete beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ConfigError("student_t_cdf: df must be > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

SampleSummary summarize(std::span<const double> samples) {
  const MeanStd ms = mean_std(samples);
  return {ms.mean, ms.std, samples.size()};
}

TTestResult t_test_b_lower(const SampleSummary& a, const SampleSummary& b, TTestKind kind) {
  if (a.n < 2 || b.n < 2) throw ConfigError("t-test: each group needs n >= 2");
  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);
  const double va = a.std * a.std;
  const double vb = b.std * b.std;
  TTestResult r;
  double se = 0.0;
  if (kind == TTestKind::Pooled) {
    r.degrees_of_freedom = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.degrees_of_freedom;
    se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  } else {
    const double qa = va / na;
    const double qb = vb / nb;
    se = std::sqrt(qa + qb);
    const double denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
    r.degrees_of_freedom = denom > 0.0 ? (qa + qb) * (qa + qb) / denom : na + nb - 2.0;
  }
  const double diff = a.mean - b.mean;
  if (se == 0.0) {
    if (diff == 0.0) {
      r.t_statistic = 0.0;
      r.p_value = 0.5;
    } else {
      r.t_statistic = diff > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
      r.p_value = diff > 0 ? 0.0 : 1.0;
    }
    return r;
  }
  r.t_statistic = diff / se;
  // Upper tail computed directly so tiny p-values keep their precision.
  r.p_value = student_t_cdf(-r.t_statistic, r.degrees_of_freedom);
  return r;
}

TTestResult t_test_b_lower(std::span<const double> a, std::span<const double> b, TTestKind kind) {
  return t_test_b_lower(summarize(a), summarize(b), kind);
}

}  // namespace wxaug
