#pragma once

#include <span>
#include <vector>

namespace vaudit {

enum class PValueMethod {
  exact_enumeration,
  t_approximation,
};

struct StatTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  PValueMethod method = PValueMethod::exact_enumeration;
  int n = 0;
  bool degenerate = false;
};

// Average ranks, ties sharing the mean of the positions they occupy.
std::vector<double> midranks(std::span<const double> values);

// Two-sided paired test, exact null enumeration over sign assignments.
// Zero differences are dropped; all-zero input is degenerate with p = 1.
// More than 20 nonzero differences is an error.
StatTestResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y);

// Rank correlation with midranks; two-sided p from the t approximation
// with n-2 degrees of freedom. Requires n >= 3 and nonzero rank variance
// on both sides.
StatTestResult spearman(std::span<const double> x, std::span<const double> y);

// Exact permutation null for the rank correlation; n <= 8.
StatTestResult spearman_exact(std::span<const double> x,
                              std::span<const double> y);

// I_x(a, b) by continued fraction, absolute accuracy ~1e-12.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T_dof| >= |t|) for Student's t.
double student_t_two_sided_p(double t, int dof);

}  // namespace vaudit
