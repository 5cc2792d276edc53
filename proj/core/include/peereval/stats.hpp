#pragma once

#include <span>
#include <vector>

namespace peereval {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute accuracy well below 1e-10 over the t-test range.
double incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with df degrees of freedom.
double student_t_cdf(double t, double df);

// Two-sided p-value for an observed t statistic.
double student_t_two_sided_p(double t, double df);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> v);

} // namespace peereval
