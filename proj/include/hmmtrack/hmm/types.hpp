#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmmtrack::hmm {

using Vector = std::vector<double>;

inline constexpr double kStochasticTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class HmmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public HmmError {
 public:
  using HmmError::HmmError;
};

class InvalidModel : public HmmError {
 public:
  using HmmError::HmmError;
};

/// The unnormalized forward vector vanished at `step` (0-based): the
/// observations are impossible under the model.
class AllZeroStep : public HmmError {
 public:
  explicit AllZeroStep(std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class DegenerateBelief : public HmmError {
 public:
  explicit DegenerateBelief(std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class InconsistentObservations : public HmmError {
 public:
  InconsistentObservations(std::size_t sequence, std::size_t step);
  std::size_t sequence() const noexcept { return sequence_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t sequence_;
  std::size_t step_;
};

class TooLarge : public HmmError {
 public:
  using HmmError::HmmError;
};

// ---------------------------------------------------------------------------
// Model types
// ---------------------------------------------------------------------------

struct StateSpace {
  std::size_t n = 0;
  std::vector<std::string> labels;  // empty or size n
};

class InitialDistribution {
 public:
  /// Throws InvalidModel unless entries are non-negative and sum to 1.
  explicit InitialDistribution(Vector mu);

  static InitialDistribution point_mass(std::size_t n, std::size_t state);
  static InitialDistribution uniform(std::size_t n);
  /// Uniform over the listed states.
  static InitialDistribution uniform_over(std::size_t n, std::span<const std::size_t> states);

  std::size_t size() const noexcept { return mu_.size(); }
  double operator[](std::size_t i) const { return mu_[i]; }
  const Vector& values() const noexcept { return mu_; }

  bool operator==(const InitialDistribution&) const = default;

 private:
  Vector mu_;
};

/// Row-stochastic n x n matrix. Values are stored densely; the structural
/// support (which entries may be nonzero) is kept as per-row column lists so
/// the recursions only visit feasible transitions.
class TransitionMatrix {
 public:
  using Mask = std::vector<std::vector<std::size_t>>;

  /// Dense matrix with every entry structurally allowed.
  static TransitionMatrix from_rows(const std::vector<Vector>& rows);
  /// Matrix restricted to `support` (row i may only be nonzero at columns
  /// support[i]). Throws InvalidModel on any violation.
  static TransitionMatrix from_rows(const std::vector<Vector>& rows, Mask support);
  /// Row-major values, optional support.
  static TransitionMatrix from_dense(std::size_t n, Vector values, std::optional<Mask> support = std::nullopt);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }
  const Vector& values() const noexcept { return values_; }

  bool has_support_mask() const noexcept { return has_mask_; }
  /// Columns structurally allowed in row i, ascending.
  std::span<const std::size_t> support(std::size_t i) const {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  bool in_support(std::size_t i, std::size_t j) const;
  std::size_t support_size() const noexcept { return cols_.size(); }
  Mask support_mask() const;
  bool same_support(const TransitionMatrix& other) const;

  /// Entrywise convex combination weight*this + (1-weight)*other. Supports
  /// must match; the result keeps that support.
  TransitionMatrix blend(const TransitionMatrix& other, double weight) const;

  double max_abs_difference(const TransitionMatrix& other) const;

  bool operator==(const TransitionMatrix& other) const;

 private:
  TransitionMatrix() = default;
  void set_support(std::optional<Mask> support);
  void validate() const;

  std::size_t n_ = 0;
  Vector values_;
  bool has_mask_ = false;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;

  friend class TransitionBuilder;
};

/// Accumulates new row values over an existing support and produces a
/// validated matrix. Used by re-estimation code.
class TransitionBuilder {
 public:
  explicit TransitionBuilder(const TransitionMatrix& shape);
  double& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * n_, n_}; }
  TransitionMatrix build() &&;

 private:
  TransitionMatrix shape_;
  std::size_t n_;
  Vector values_;
};

class ObservationVector {
 public:
  enum class Kind {
    NegativeInfo,    ///< b_i = 0 on observed-empty states, 1 elsewhere
    DirectSighting,  ///< one-hot at the sighted state
    General,         ///< arbitrary likelihoods in [0,1]
  };

  /// All ones except zeros at `observed_empty`.
  static ObservationVector negative_info(std::size_t n, std::span<const std::size_t> observed_empty);
  static ObservationVector direct_sighting(std::size_t n, std::size_t state);
  /// Validates entries against the invariants of `kind`.
  static ObservationVector from_values(Vector b, Kind kind);

  std::size_t size() const noexcept { return b_.size(); }
  double operator[](std::size_t i) const { return b_[i]; }
  const Vector& values() const noexcept { return b_; }
  Kind kind() const noexcept { return kind_; }

  /// Indices where b is 0 (the observed-empty set for negative information).
  std::vector<std::size_t> zeros() const;
  /// Sighted state for DirectSighting vectors.
  std::optional<std::size_t> sighted_state() const;

  bool operator==(const ObservationVector&) const = default;

 private:
  ObservationVector(Vector b, Kind kind) : b_(std::move(b)), kind_(kind) {}
  Vector b_;
  Kind kind_;
};

class ObservationSequence {
 public:
  ObservationSequence() = default;
  /// Throws InvalidModel on an empty sequence, DimensionMismatch on ragged lengths.
  explicit ObservationSequence(std::vector<ObservationVector> steps);

  std::size_t length() const noexcept { return steps_.size(); }
  std::size_t state_count() const noexcept { return steps_.empty() ? 0 : steps_.front().size(); }
  const ObservationVector& operator[](std::size_t t) const { return steps_[t]; }
  const std::vector<ObservationVector>& steps() const noexcept { return steps_; }
  /// Prefix of the first `t` steps.
  ObservationSequence prefix(std::size_t t) const;

  void push_back(ObservationVector v);

  bool operator==(const ObservationSequence&) const = default;

 private:
  std::vector<ObservationVector> steps_;
};

}  // namespace hmmtrack::hmm
