#pragma once

#include <span>
#include <vector>

#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::hmm {

struct BaumWelchOptions {
  int max_iters = 100;
  /// Stop once the largest absolute change of any a_ij drops below this.
  double tol = 1e-6;
  /// Added to every in-support entry of re-estimated rows before
  /// renormalizing. Zero gives plain EM.
  double smoothing_eps = 1e-6;
};

struct BaumWelchResult {
  TransitionMatrix a_hat;
  /// Pooled log-likelihood of the data under each iterate: entry k is
  /// evaluated at the matrix entering iteration k, and the final entry at
  /// a_hat. Length is iters + 1.
  std::vector<double> loglik_trace;
  int iters = 0;
};

/// Pooled sufficient statistics of one E-step over several sequences.
struct ExpectedTransitions {
  std::vector<Vector> counts;  // sum over sequences and t of xi_t(i,j)
  double log_likelihood = 0.0;
};

/// E-step over all sequences. Throws InconsistentObservations naming the
/// first sequence whose likelihood is zero.
ExpectedTransitions expected_transitions(std::span<const ObservationSequence> sequences,
                                         const InitialDistribution& mu, const TransitionMatrix& a);

/// Sum of per-sequence log-likelihoods, -inf if any sequence is impossible.
double pooled_log_likelihood(std::span<const ObservationSequence> sequences, const InitialDistribution& mu,
                             const TransitionMatrix& a);

/// Multi-sequence Baum-Welch re-estimating the transition matrix only. The
/// initial distribution and the observation vectors are fixed inputs. Rows
/// whose expected outgoing count is zero keep their previous values.
BaumWelchResult baum_welch(std::span<const ObservationSequence> sequences, const InitialDistribution& mu,
                           const TransitionMatrix& a0, const BaumWelchOptions& opts = {});

}  // namespace hmmtrack::hmm
