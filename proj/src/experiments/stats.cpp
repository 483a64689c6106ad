#include "hmmtrack/experiments/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmmtrack::experiments {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
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
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::domain_error("student t: degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t_test: each sample needs at least two values");
  auto moments = [](std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0, scale = 0.0;
    for (double x : xs) {
      ss += (x - mean) * (x - mean);
      scale = std::max(scale, std::abs(x));
    }
    double var = ss / static_cast<double>(xs.size() - 1);
    // Spread at rounding level (values equal up to a few ulps) counts as none.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    if (var <= noise * noise) var = 0.0;
    return std::pair{mean, var};
  };
  const auto [mean_a, var_a] = moments(a);
  const auto [mean_b, var_b] = moments(b);
  if (var_a == 0.0 && var_b == 0.0) throw DegenerateVariance("welch_t_test: both samples have zero variance");

  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = var_a / na, sb = var_b / nb;
  WelchResult r;
  r.t = (mean_a - mean_b) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

}  // namespace hmmtrack::experiments
