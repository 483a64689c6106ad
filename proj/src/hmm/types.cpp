#include "hmmtrack/hmm/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hmmtrack::hmm {

AllZeroStep::AllZeroStep(std::size_t step)
    : HmmError("forward recursion vanished at step " + std::to_string(step) +
               ": observations have zero probability under the model"),
      step_(step) {}

DegenerateBelief::DegenerateBelief(std::size_t step)
    : HmmError("belief at step " + std::to_string(step) + " is degenerate (all-zero forward vector)"),
      step_(step) {}

InconsistentObservations::InconsistentObservations(std::size_t sequence, std::size_t step)
    : HmmError("observation sequence " + std::to_string(sequence) + " has zero likelihood (vanished at step " +
               std::to_string(step) + ")"),
      sequence_(sequence),
      step_(step) {}

namespace {

void check_probability_vector(const Vector& v, const char* what) {
  if (v.empty()) throw InvalidModel(std::string(what) + ": empty");
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidModel(std::string(what) + ": negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw InvalidModel(std::string(what) + ": entries sum to " + std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// InitialDistribution
// ---------------------------------------------------------------------------

InitialDistribution::InitialDistribution(Vector mu) : mu_(std::move(mu)) {
  check_probability_vector(mu_, "initial distribution");
}

InitialDistribution InitialDistribution::point_mass(std::size_t n, std::size_t state) {
  if (state >= n) throw DimensionMismatch("point mass state out of range");
  Vector mu(n, 0.0);
  mu[state] = 1.0;
  return InitialDistribution(std::move(mu));
}

InitialDistribution InitialDistribution::uniform(std::size_t n) {
  return InitialDistribution(Vector(n, 1.0 / static_cast<double>(n)));
}

InitialDistribution InitialDistribution::uniform_over(std::size_t n, std::span<const std::size_t> states) {
  if (states.empty()) throw InvalidModel("initial distribution: empty state set");
  Vector mu(n, 0.0);
  for (std::size_t s : states) {
    if (s >= n) throw DimensionMismatch("initial distribution state out of range");
    mu[s] = 1.0;
  }
  const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (double& x : mu) x /= total;
  return InitialDistribution(std::move(mu));
}

// ---------------------------------------------------------------------------
// TransitionMatrix
// ---------------------------------------------------------------------------

void TransitionMatrix::set_support(std::optional<Mask> support) {
  row_ptr_.assign(n_ + 1, 0);
  cols_.clear();
  has_mask_ = support.has_value();
  if (!support) {
    cols_.reserve(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) cols_.push_back(j);
      row_ptr_[i + 1] = cols_.size();
    }
    return;
  }
  if (support->size() != n_) throw DimensionMismatch("support mask has wrong number of rows");
  for (std::size_t i = 0; i < n_; ++i) {
    auto row = (*support)[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (std::size_t j : row) {
      if (j >= n_) throw DimensionMismatch("support mask column out of range");
      cols_.push_back(j);
    }
    row_ptr_[i + 1] = cols_.size();
  }
}

void TransitionMatrix::validate() const {
  if (n_ == 0) throw InvalidModel("transition matrix: empty");
  if (values_.size() != n_ * n_) throw DimensionMismatch("transition matrix: value count is not n*n");
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    auto cols = support(i);
    std::size_t k = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double x = values_[i * n_ + j];
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw InvalidModel("transition matrix: negative or non-finite entry at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      }
      const bool allowed = k < cols.size() && cols[k] == j;
      if (allowed) ++k;
      if (!allowed && x != 0.0) {
        throw InvalidModel("transition matrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") lies outside the support");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      throw InvalidModel("transition matrix: row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

TransitionMatrix TransitionMatrix::from_rows(const std::vector<Vector>& rows) {
  const std::size_t n = rows.size();
  Vector values;
  values.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw DimensionMismatch("transition matrix: ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return from_dense(n, std::move(values));
}

TransitionMatrix TransitionMatrix::from_rows(const std::vector<Vector>& rows, Mask support) {
  const std::size_t n = rows.size();
  Vector values;
  values.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw DimensionMismatch("transition matrix: ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return from_dense(n, std::move(values), std::move(support));
}

TransitionMatrix TransitionMatrix::from_dense(std::size_t n, Vector values, std::optional<Mask> support) {
  TransitionMatrix m;
  m.n_ = n;
  m.values_ = std::move(values);
  m.set_support(std::move(support));
  m.validate();
  return m;
}

bool TransitionMatrix::in_support(std::size_t i, std::size_t j) const {
  auto cols = support(i);
  return std::binary_search(cols.begin(), cols.end(), j);
}

TransitionMatrix::Mask TransitionMatrix::support_mask() const {
  Mask mask(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto cols = support(i);
    mask[i].assign(cols.begin(), cols.end());
  }
  return mask;
}

bool TransitionMatrix::same_support(const TransitionMatrix& other) const {
  return n_ == other.n_ && row_ptr_ == other.row_ptr_ && cols_ == other.cols_;
}

TransitionMatrix TransitionMatrix::blend(const TransitionMatrix& other, double weight) const {
  if (!same_support(other)) throw DimensionMismatch("blend: matrices have different supports");
  if (!(weight >= 0.0 && weight <= 1.0)) throw InvalidModel("blend: weight outside [0,1]");
  TransitionMatrix out = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    out.values_[k] = weight * values_[k] + (1.0 - weight) * other.values_[k];
  }
  out.validate();
  return out;
}

double TransitionMatrix::max_abs_difference(const TransitionMatrix& other) const {
  if (n_ != other.n_) throw DimensionMismatch("matrix sizes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) worst = std::max(worst, std::abs(values_[k] - other.values_[k]));
  return worst;
}

bool TransitionMatrix::operator==(const TransitionMatrix& other) const {
  return n_ == other.n_ && has_mask_ == other.has_mask_ && values_ == other.values_ && same_support(other);
}

TransitionBuilder::TransitionBuilder(const TransitionMatrix& shape)
    : shape_(shape), n_(shape.size()), values_(shape.values()) {}

TransitionMatrix TransitionBuilder::build() && {
  shape_.values_ = std::move(values_);
  shape_.validate();
  return std::move(shape_);
}

// ---------------------------------------------------------------------------
// Observations
// ---------------------------------------------------------------------------

ObservationVector ObservationVector::negative_info(std::size_t n, std::span<const std::size_t> observed_empty) {
  Vector b(n, 1.0);
  for (std::size_t s : observed_empty) {
    if (s >= n) throw DimensionMismatch("observed state index out of range");
    b[s] = 0.0;
  }
  return from_values(std::move(b), Kind::NegativeInfo);
}

ObservationVector ObservationVector::direct_sighting(std::size_t n, std::size_t state) {
  if (state >= n) throw DimensionMismatch("sighted state index out of range");
  Vector b(n, 0.0);
  b[state] = 1.0;
  return ObservationVector(std::move(b), Kind::DirectSighting);
}

ObservationVector ObservationVector::from_values(Vector b, Kind kind) {
  if (b.empty()) throw InvalidModel("observation vector: empty");
  std::size_t ones = 0;
  bool any_positive = false;
  for (double x : b) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidModel("observation vector: entry outside [0,1]");
    if (kind != Kind::General && x != 0.0 && x != 1.0) throw InvalidModel("observation vector: entry is not binary");
    if (x == 1.0) ++ones;
    if (x > 0.0) any_positive = true;
  }
  switch (kind) {
    case Kind::NegativeInfo:
      if (ones == 0) throw InvalidModel("observation vector: negative information eliminates every state");
      break;
    case Kind::DirectSighting:
      if (ones != 1) throw InvalidModel("observation vector: a sighting must be one-hot");
      break;
    case Kind::General:
      if (!any_positive) throw InvalidModel("observation vector: all entries are zero");
      break;
  }
  return ObservationVector(std::move(b), kind);
}

std::vector<std::size_t> ObservationVector::zeros() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (b_[i] == 0.0) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> ObservationVector::sighted_state() const {
  if (kind_ != Kind::DirectSighting) return std::nullopt;
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (b_[i] == 1.0) return i;
  }
  return std::nullopt;
}

ObservationSequence::ObservationSequence(std::vector<ObservationVector> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw InvalidModel("observation sequence: empty");
  for (const auto& s : steps_) {
    if (s.size() != steps_.front().size()) throw DimensionMismatch("observation sequence: ragged vector lengths");
  }
}

ObservationSequence ObservationSequence::prefix(std::size_t t) const {
  if (t == 0 || t > steps_.size()) throw DimensionMismatch("observation prefix length out of range");
  return ObservationSequence(std::vector<ObservationVector>(steps_.begin(), steps_.begin() + static_cast<long>(t)));
}

void ObservationSequence::push_back(ObservationVector v) {
  if (!steps_.empty() && v.size() != steps_.front().size()) {
    throw DimensionMismatch("observation sequence: ragged vector lengths");
  }
  steps_.push_back(std::move(v));
}

}  // namespace hmmtrack::hmm
