#include "hmmtrack/hmm/enumerate.hpp"

#include <cmath>

namespace hmmtrack::hmm {

Enumeration enumerate_likelihood(const InitialDistribution& mu, const TransitionMatrix& a,
                                 const ObservationSequence& obs) {
  const std::size_t n = a.size();
  const std::size_t T = obs.length();
  if (mu.size() != n || obs.state_count() != n) throw DimensionMismatch("enumerate_likelihood: state counts differ");
  if (std::pow(static_cast<double>(n), static_cast<double>(T)) > kEnumerationLimit) {
    throw TooLarge("enumerate_likelihood: n^T exceeds the enumeration guard");
  }

  Enumeration out;
  out.posterior.assign(T, Vector(n, 0.0));
  out.joint.assign(T > 0 ? T - 1 : 0, std::vector<Vector>(n, Vector(n, 0.0)));

  // Odometer over paths x_0..x_{T-1}.
  std::vector<std::size_t> path(T, 0);
  while (true) {
    double w = mu[path[0]] * obs[0][path[0]];
    for (std::size_t t = 1; t < T && w != 0.0; ++t) w *= a(path[t - 1], path[t]) * obs[t][path[t]];
    if (w != 0.0) {
      out.likelihood += w;
      for (std::size_t t = 0; t < T; ++t) out.posterior[t][path[t]] += w;
      for (std::size_t t = 1; t < T; ++t) out.joint[t - 1][path[t - 1]][path[t]] += w;
    }
    std::size_t pos = 0;
    while (pos < T && ++path[pos] == n) path[pos++] = 0;
    if (pos == T) break;
  }

  if (out.likelihood > 0.0) {
    for (auto& row : out.posterior) {
      for (double& x : row) x /= out.likelihood;
    }
    for (auto& m : out.joint) {
      for (auto& row : m) {
        for (double& x : row) x /= out.likelihood;
      }
    }
  }
  return out;
}

}  // namespace hmmtrack::hmm
