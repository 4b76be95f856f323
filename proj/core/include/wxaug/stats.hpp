#pragma once

#include <cstddef>
#include <span>

namespace wxaug {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // unbiased (n - 1)
};

/// Throws ConfigError for fewer than two samples.
MeanStd mean_std(std::span<const double> samples);

/// Regularized incomplete beta I_x(a, b) via the modified Lentz continued
/// fraction, using the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) where it
/// converges faster.
double regularized_incomplete_beta(double a, double b, double x);

/// Student t CDF through I_x(df/2, 1/2) with x = df / (df + t^2).
/// Throws ConfigError for df <= 0.
double student_t_cdf(double t, double df);

struct SampleSummary {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

SampleSummary summarize(std::span<const double> samples);

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 0.5;
};

enum class TTestKind { Pooled, Welch };

/// One-tailed two-sample t-test of H1: mean(b) < mean(a).
///
/// Pooled: s_p^2 = ((n_a-1) s_a^2 + (n_b-1) s_b^2) / (n_a+n_b-2),
/// t = (mean_a - mean_b) / (s_p sqrt(1/n_a + 1/n_b)), df = n_a + n_b - 2,
/// p = 1 - F_t(t, df). Welch uses the unpooled standard error and the
/// Welch-Satterthwaite df. Zero variance with equal means gives t = 0,
/// p = 0.5; with unequal means t is +/-infinity and p is 0 or 1.
/// Throws ConfigError if either n < 2.
TTestResult t_test_b_lower(const SampleSummary& a, const SampleSummary& b,
                           TTestKind kind = TTestKind::Pooled);

TTestResult t_test_b_lower(std::span<const double> a, std::span<const double> b,
                           TTestKind kind = TTestKind::Pooled);

}  // namespace wxaug
