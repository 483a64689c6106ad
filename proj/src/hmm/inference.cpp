#include "hmmtrack/hmm/inference.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace hmmtrack::hmm {

namespace {

void require_dims(const InitialDistribution& mu, const TransitionMatrix& a, const ObservationSequence& obs) {
  if (obs.length() == 0) throw InvalidModel("observation sequence is empty");
  if (mu.size() != a.size() || obs.state_count() != a.size()) {
    throw DimensionMismatch("state counts of initial distribution, transition matrix and observations differ");
  }
}

void normalize(Vector& v, double total) {
  for (double& x : v) x /= total;
}

}  // namespace

double ForwardPass::log_likelihood() const {
  if (degenerate()) return -std::numeric_limits<double>::infinity();
  return std::accumulate(log_scale.begin(), log_scale.end(), 0.0);
}

double propagate(const Vector& alpha, const TransitionMatrix& a, const ObservationVector& b, Vector& out) {
  const std::size_t n = a.size();
  out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = alpha[i];
    if (ai == 0.0) continue;
    auto row = a.row(i);
    for (std::size_t j : a.support(i)) out[j] += ai * row[j];
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] *= b[j];
    total += out[j];
  }
  return total;
}

ForwardPass forward(const InitialDistribution& mu, const TransitionMatrix& a, const ObservationSequence& obs,
                    OnZeroStep on_zero) {
  require_dims(mu, a, obs);
  const std::size_t n = a.size();
  const std::size_t T = obs.length();

  ForwardPass pass;
  pass.scaled_alpha.assign(T, Vector(n, 0.0));
  pass.log_scale.assign(T, 0.0);

  auto vanish = [&](std::size_t t) {
    if (on_zero == OnZeroStep::Throw) throw AllZeroStep(t);
    pass.degenerate_from = t;
    for (std::size_t s = t; s < T; ++s) pass.scaled_alpha[s].assign(n, 0.0);
  };

  Vector& first = pass.scaled_alpha[0];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    first[i] = mu[i] * obs[0][i];
    total += first[i];
  }
  if (!(total > 0.0)) {
    vanish(0);
    return pass;
  }
  normalize(first, total);
  pass.log_scale[0] = std::log(total);

  for (std::size_t t = 1; t < T; ++t) {
    total = propagate(pass.scaled_alpha[t - 1], a, obs[t], pass.scaled_alpha[t]);
    if (!(total > 0.0)) {
      vanish(t);
      return pass;
    }
    normalize(pass.scaled_alpha[t], total);
    pass.log_scale[t] = std::log(total);
  }
  return pass;
}

BackwardPass backward(const TransitionMatrix& a, const ObservationSequence& obs, const ForwardPass& fwd) {
  const std::size_t n = a.size();
  const std::size_t T = obs.length();
  if (obs.state_count() != n || fwd.length() != T || fwd.log_scale.size() != T) {
    throw DimensionMismatch("backward: forward pass does not match the observations");
  }
  if (fwd.degenerate()) throw DegenerateBelief(*fwd.degenerate_from);

  BackwardPass pass;
  pass.scaled_beta.assign(T, Vector(n, 1.0));
  for (std::size_t t = T - 1; t-- > 0;) {
    const Vector& next = pass.scaled_beta[t + 1];
    const ObservationVector& b = obs[t + 1];
    const double c = std::exp(fwd.log_scale[t + 1]);
    Vector& cur = pass.scaled_beta[t];
    for (std::size_t i = 0; i < n; ++i) {
      auto row = a.row(i);
      double acc = 0.0;
      for (std::size_t j : a.support(i)) acc += row[j] * b[j] * next[j];
      cur[i] = acc / c;
    }
  }
  return pass;
}

Vector filtered_posterior(const ForwardPass& fwd, std::size_t t) {
  if (t >= fwd.length()) throw DimensionMismatch("filtered_posterior: time index out of range");
  if (fwd.degenerate_from && t >= *fwd.degenerate_from) throw DegenerateBelief(t);
  Vector p = fwd.scaled_alpha[t];
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateBelief(t);
  normalize(p, total);
  return p;
}

SmoothedStats smoothed_stats(const ForwardPass& fwd, const BackwardPass& bwd, const TransitionMatrix& a,
                             const ObservationSequence& obs) {
  const std::size_t n = a.size();
  const std::size_t T = obs.length();
  if (fwd.degenerate()) throw DegenerateBelief(*fwd.degenerate_from);
  if (fwd.length() != T || bwd.scaled_beta.size() != T) throw DimensionMismatch("smoothed_stats: pass lengths differ");

  SmoothedStats stats;
  stats.gamma.assign(T, Vector(n, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) stats.gamma[t][i] = fwd.scaled_alpha[t][i] * bwd.scaled_beta[t][i];
  }

  stats.xi_sum.assign(n, Vector(n, 0.0));
  for (std::size_t t = 1; t < T; ++t) {
    const Vector& prev = fwd.scaled_alpha[t - 1];
    const Vector& beta = bwd.scaled_beta[t];
    const ObservationVector& b = obs[t];
    const double c = std::exp(fwd.log_scale[t]);
    for (std::size_t i = 0; i < n; ++i) {
      if (prev[i] == 0.0) continue;
      auto row = a.row(i);
      const double w = prev[i] / c;
      for (std::size_t j : a.support(i)) stats.xi_sum[i][j] += w * row[j] * b[j] * beta[j];
    }
  }
  return stats;
}

std::vector<Vector> pair_posterior(const ForwardPass& fwd, const BackwardPass& bwd, const TransitionMatrix& a,
                                   const ObservationSequence& obs, std::size_t t) {
  const std::size_t n = a.size();
  if (t == 0 || t >= obs.length()) throw DimensionMismatch("pair_posterior: t must satisfy 1 <= t < T");
  if (fwd.degenerate()) throw DegenerateBelief(*fwd.degenerate_from);
  std::vector<Vector> xi(n, Vector(n, 0.0));
  const double c = std::exp(fwd.log_scale[t]);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = a.row(i);
    for (std::size_t j : a.support(i)) {
      xi[i][j] = fwd.scaled_alpha[t - 1][i] * row[j] * obs[t][j] * bwd.scaled_beta[t][j] / c;
    }
  }
  return xi;
}

Vector alpha_matrix_form(const InitialDistribution& mu, const TransitionMatrix& a, const ObservationSequence& obs,
                         std::size_t t) {
  require_dims(mu, a, obs);
  if (t >= obs.length()) throw DimensionMismatch("alpha_matrix_form: time index out of range");
  const std::size_t n = a.size();

  auto diag = [&](const ObservationVector& b) {
    std::vector<Vector> m(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = b[i];
    return m;
  };
  std::vector<Vector> dense_a(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dense_a[i][j] = a(i, j);
  }
  auto times = [n](const Vector& v, const std::vector<Vector>& m) {
    Vector out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) out[j] += v[i] * m[i][j];
    }
    return out;
  };

  Vector row = times(mu.values(), diag(obs[0]));
  for (std::size_t s = 1; s <= t; ++s) row = times(times(row, dense_a), diag(obs[s]));
  return row;
}

Vector unscaled_alpha(const ForwardPass& fwd, std::size_t t) {
  if (t >= fwd.length()) throw DimensionMismatch("unscaled_alpha: time index out of range");
  double log_total = 0.0;
  for (std::size_t s = 0; s <= t; ++s) log_total += fwd.log_scale[s];
  const double scale = std::exp(log_total);
  Vector out = fwd.scaled_alpha[t];
  for (double& x : out) x *= scale;
  return out;
}

}  // namespace hmmtrack::hmm
