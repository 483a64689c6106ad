#pragma once

#include <vector>

#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::hmm {

inline constexpr double kEnumerationLimit = 1e6;

struct Enumeration {
  double likelihood = 0.0;
  std::vector<Vector> posterior;           // T x n, P(x_t = i | y_0..y_{T-1})
  std::vector<std::vector<Vector>> joint;  // (T-1) x n x n, P(x_{t-1} = i, x_t = j | y)
};

/// Exact quantities by summing over all n^T state paths. Test oracle only;
/// throws TooLarge when n^T exceeds kEnumerationLimit.
Enumeration enumerate_likelihood(const InitialDistribution& mu, const TransitionMatrix& a,
                                 const ObservationSequence& obs);

}  // namespace hmmtrack::hmm
