#pragma once

#include <span>
#include <stdexcept>

namespace hmmtrack::experiments {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

class DegenerateVariance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Welch's unequal-variance two-sample t test with Welch-Satterthwaite
/// degrees of freedom. Requires at least two values per sample and a
/// positive variance in at least one of them. A sample whose values agree to
/// within rounding error has zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace hmmtrack::experiments
