#pragma once

#include <optional>
#include <vector>

#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::hmm {

/// Scaled forward values. Row t holds alpha_t normalized to sum 1; the log of
/// the normalizer removed at step t is log_scale[t], so the sequence
/// log-likelihood is the sum of log_scale. Time indices are 0-based.
struct ForwardPass {
  std::vector<Vector> scaled_alpha;
  Vector log_scale;
  /// First step whose unnormalized vector was identically zero. Rows from
  /// there on are zero and the pass is unusable past that point.
  std::optional<std::size_t> degenerate_from;

  std::size_t length() const noexcept { return scaled_alpha.size(); }
  bool degenerate() const noexcept { return degenerate_from.has_value(); }
  double log_likelihood() const;
};

/// Backward values scaled with the forward normalizers of the paired pass:
/// scaled_beta[t] = beta_t / prod_{s>t} c_s. The last row is all ones.
struct BackwardPass {
  std::vector<Vector> scaled_beta;
};

struct SmoothedStats {
  std::vector<Vector> gamma;  // T x n
  std::vector<Vector> xi_sum;  // n x n, sum over t = 1..T-1 of xi_t
};

enum class OnZeroStep { Throw, Flag };

/// One predict-update step of the recursion: out_j = b_j * sum_i alpha_i a_ij.
/// Returns the unnormalized total mass of `out` and leaves `out` unnormalized.
double propagate(const Vector& alpha, const TransitionMatrix& a, const ObservationVector& b, Vector& out);

/// Scaled forward recursion. With OnZeroStep::Throw a vanishing step raises
/// AllZeroStep; with Flag the pass is marked degenerate and returned.
ForwardPass forward(const InitialDistribution& mu, const TransitionMatrix& a, const ObservationSequence& obs,
                    OnZeroStep on_zero = OnZeroStep::Throw);

BackwardPass backward(const TransitionMatrix& a, const ObservationSequence& obs, const ForwardPass& fwd);

/// P(x_t = i | y_0..y_t).
Vector filtered_posterior(const ForwardPass& fwd, std::size_t t);

SmoothedStats smoothed_stats(const ForwardPass& fwd, const BackwardPass& bwd, const TransitionMatrix& a,
                             const ObservationSequence& obs);

/// xi_t(i,j) = P(x_{t-1} = i, x_t = j | y), for 1 <= t < T.
std::vector<Vector> pair_posterior(const ForwardPass& fwd, const BackwardPass& bwd, const TransitionMatrix& a,
                                   const ObservationSequence& obs, std::size_t t);

/// Unnormalized alpha_t as the row-vector product mu B(y_0) A B(y_1) ... A B(y_t)
/// with dense matrices. Independent of the scaled recursion; used to
/// cross-check it.
Vector alpha_matrix_form(const InitialDistribution& mu, const TransitionMatrix& a, const ObservationSequence& obs,
                         std::size_t t);

/// Unscaled alpha_t recovered from a scaled pass.
Vector unscaled_alpha(const ForwardPass& fwd, std::size_t t);

}  // namespace hmmtrack::hmm
