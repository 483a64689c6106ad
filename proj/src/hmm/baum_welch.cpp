#include "hmmtrack/hmm/baum_welch.hpp"

#include <cmath>
#include <limits>

#include "hmmtrack/hmm/inference.hpp"

namespace hmmtrack::hmm {

namespace {

void check_sequences(std::span<const ObservationSequence> sequences, std::size_t n) {
  if (sequences.empty()) throw InvalidModel("baum_welch: no observation sequences");
  for (const auto& seq : sequences) {
    if (seq.state_count() != n) throw DimensionMismatch("baum_welch: sequence state count differs from the model");
  }
}

TransitionMatrix reestimate(const TransitionMatrix& current, const std::vector<Vector>& counts, double eps) {
  const std::size_t n = current.size();
  TransitionBuilder next(current);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = current.support(i);
    double denom = 0.0;
    for (std::size_t j : cols) denom += counts[i][j];
    if (!(denom > 0.0)) continue;  // never left state i: 0/0, keep the row

    auto row = next.row(i);
    double total = 0.0;
    for (std::size_t j : cols) {
      row[j] = counts[i][j] / denom + eps;
      total += row[j];
    }
    for (std::size_t j : cols) row[j] /= total;
  }
  return std::move(next).build();
}

}  // namespace

ExpectedTransitions expected_transitions(std::span<const ObservationSequence> sequences,
                                         const InitialDistribution& mu, const TransitionMatrix& a) {
  const std::size_t n = a.size();
  check_sequences(sequences, n);
  ExpectedTransitions out;
  out.counts.assign(n, Vector(n, 0.0));
  for (std::size_t m = 0; m < sequences.size(); ++m) {
    const auto& seq = sequences[m];
    ForwardPass fwd;
    try {
      fwd = forward(mu, a, seq);
    } catch (const AllZeroStep& e) {
      throw InconsistentObservations(m, e.step());
    }
    const BackwardPass bwd = backward(a, seq, fwd);
    const SmoothedStats stats = smoothed_stats(fwd, bwd, a, seq);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j : a.support(i)) out.counts[i][j] += stats.xi_sum[i][j];
    }
    out.log_likelihood += fwd.log_likelihood();
  }
  return out;
}

double pooled_log_likelihood(std::span<const ObservationSequence> sequences, const InitialDistribution& mu,
                             const TransitionMatrix& a) {
  check_sequences(sequences, a.size());
  double total = 0.0;
  for (const auto& seq : sequences) {
    const ForwardPass fwd = forward(mu, a, seq, OnZeroStep::Flag);
    if (fwd.degenerate()) return -std::numeric_limits<double>::infinity();
    total += fwd.log_likelihood();
  }
  return total;
}

BaumWelchResult baum_welch(std::span<const ObservationSequence> sequences, const InitialDistribution& mu,
                           const TransitionMatrix& a0, const BaumWelchOptions& opts) {
  if (mu.size() != a0.size()) throw DimensionMismatch("baum_welch: initial distribution size differs from the model");
  check_sequences(sequences, a0.size());
  if (opts.max_iters < 0 || opts.tol < 0.0 || opts.smoothing_eps < 0.0) {
    throw InvalidModel("baum_welch: negative option value");
  }

  BaumWelchResult result{a0, {}, 0};
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const ExpectedTransitions e = expected_transitions(sequences, mu, result.a_hat);
    result.loglik_trace.push_back(e.log_likelihood);

    TransitionMatrix next = reestimate(result.a_hat, e.counts, opts.smoothing_eps);
    const double delta = next.max_abs_difference(result.a_hat);
    result.a_hat = std::move(next);
    ++result.iters;
    if (delta < opts.tol) break;
  }
  result.loglik_trace.push_back(pooled_log_likelihood(sequences, mu, result.a_hat));
  return result;
}

}  // namespace hmmtrack::hmm
