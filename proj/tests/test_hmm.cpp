#include <doctest.h>

#include <cmath>
#include <random>

#include "hmmtrack/hmm/baum_welch.hpp"
#include "hmmtrack/hmm/enumerate.hpp"
#include "hmmtrack/hmm/inference.hpp"
#include "support/generators.hpp"

using namespace hmmtrack;
using namespace hmmtrack::hmm;
namespace tg = hmmtrack::testgen;

namespace {

ObservationVector ones(std::size_t n) { return ObservationVector::negative_info(n, {}); }

ObservationVector empty_at(std::size_t n, std::initializer_list<std::size_t> zeros) {
  std::vector<std::size_t> z(zeros);
  return ObservationVector::negative_info(n, z);
}

TransitionMatrix chain3() {
  // 0 <-> 1 <-> 2 with Stay, uniform over legal moves.
  return TransitionMatrix::from_rows({{0.5, 0.5, 0.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.0, 0.5, 0.5}},
                                     {{0, 1}, {0, 1, 2}, {1, 2}});
}

}  // namespace

TEST_CASE("initial distribution validation") {
  CHECK_NOTHROW(InitialDistribution({0.25, 0.75}));
  CHECK_THROWS_AS(InitialDistribution({0.5, 0.6}), InvalidModel);
  CHECK_THROWS_AS(InitialDistribution({-0.1, 1.1}), InvalidModel);
  CHECK(InitialDistribution::point_mass(3, 2).values() == Vector{0, 0, 1});
  const std::vector<std::size_t> two{0, 2};
  CHECK(InitialDistribution::uniform_over(4, two).values() == Vector{0.5, 0, 0.5, 0});
}

TEST_CASE("transition matrix validation") {
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{0.5, 0.4}, {0, 1}}), InvalidModel);
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{1.5, -0.5}, {0, 1}}), InvalidModel);
  // Mass outside the declared support.
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{0.5, 0.5}, {0, 1}}, {{0}, {1}}), InvalidModel);
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{1.0, 0.0}}), DimensionMismatch);

  const auto a = chain3();
  CHECK(a.support_size() == 7);
  CHECK(a.in_support(1, 2));
  CHECK_FALSE(a.in_support(0, 2));
}

TEST_CASE("blend keeps the support and stays stochastic") {
  std::mt19937_64 rng(11);
  const auto a = chain3();
  const auto b = TransitionMatrix::from_rows({{0.9, 0.1, 0.0}, {0.2, 0.2, 0.6}, {0.0, 0.7, 0.3}}, a.support_mask());
  CHECK(a.blend(b, 1.0) == a);
  CHECK(a.blend(b, 0.0).max_abs_difference(b) == 0.0);
  const auto mid = a.blend(b, 0.5);
  CHECK(mid(1, 2) == doctest::Approx((1.0 / 3 + 0.6) / 2));
  CHECK(tg::max_row_sum_error(mid) < 1e-12);
  CHECK(mid.same_support(a));
  CHECK(mid(0, 2) == 0.0);
}

TEST_CASE("observation vectors") {
  const auto neg = ObservationVector::negative_info(4, std::vector<std::size_t>{1, 3});
  CHECK(neg.values() == Vector{1, 0, 1, 0});
  CHECK(neg.zeros() == std::vector<std::size_t>{1, 3});
  CHECK(ObservationVector::direct_sighting(3, 1).sighted_state() == 1);
  // Every state observed empty cannot be negative information.
  CHECK_THROWS_AS(ObservationVector::negative_info(2, std::vector<std::size_t>{0, 1}), InvalidModel);
  CHECK_THROWS_AS(ObservationVector::from_values({0.5, 1}, ObservationVector::Kind::NegativeInfo), InvalidModel);
  CHECK_THROWS_AS(ObservationVector::from_values({1, 1}, ObservationVector::Kind::DirectSighting), InvalidModel);
  CHECK_NOTHROW(ObservationVector::from_values({0.5, 0.25}, ObservationVector::Kind::General));
  CHECK_THROWS_AS(ObservationSequence({ones(2), ones(3)}), DimensionMismatch);
  CHECK_THROWS_AS(ObservationSequence(std::vector<ObservationVector>{}), InvalidModel);
}

TEST_CASE("forward on the three-cell corridor matches hand computation") {
  // Agent known at the left end, then the middle cell is observed empty:
  // alpha_1 = (1,0,0) A (.) (1,0,1) = (0.5, 0, 0).
  const auto a = chain3();
  const auto mu = InitialDistribution::point_mass(3, 0);
  const ObservationSequence obs({ones(3), empty_at(3, {1})});
  const auto fwd = forward(mu, a, obs);
  CHECK(fwd.log_likelihood() == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(filtered_posterior(fwd, 1) == Vector{1.0, 0.0, 0.0});
}

TEST_CASE("all-ones observations leave a uniform chain uniform") {
  const auto a = TransitionMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const ObservationSequence obs({ones(2), ones(2), ones(2)});
  const auto fwd = forward(InitialDistribution::uniform(2), a, obs);
  CHECK(fwd.log_likelihood() == doctest::Approx(0.0));
  CHECK(tg::max_abs_diff(filtered_posterior(fwd, 2), {0.5, 0.5}) < 1e-15);
}

TEST_CASE("impossible sequences") {
  const auto a = chain3();
  const auto mu = InitialDistribution::point_mass(3, 0);
  // From state 0 the chain cannot reach state 2 in one step.
  const ObservationSequence obs({ones(3), ObservationVector::direct_sighting(3, 2)});
  CHECK_THROWS_AS(forward(mu, a, obs), AllZeroStep);
  const auto flagged = forward(mu, a, obs, OnZeroStep::Flag);
  CHECK(flagged.degenerate_from == 1);
  CHECK(std::isinf(flagged.log_likelihood()));
  CHECK(enumerate_likelihood(mu, a, obs).likelihood == 0.0);
}

TEST_CASE("enumeration refuses large instances") {
  std::vector<ObservationVector> steps(9, ones(5));
  const auto a = TransitionMatrix::from_rows(std::vector<Vector>(5, Vector(5, 0.2)));
  CHECK_THROWS_AS(enumerate_likelihood(InitialDistribution::uniform(5), a, ObservationSequence(steps)), TooLarge);
}

TEST_CASE("scaled forward-backward equals brute-force enumeration on random instances") {
  std::mt19937_64 rng(20240611);
  for (int k = 0; k < 200; ++k) {
    const auto inst = tg::random_instance(rng, 5, 6);
    const auto& obs = inst.sequences[0];
    const auto fwd = forward(inst.mu, inst.a, obs);
    const auto bwd = backward(inst.a, obs, fwd);
    const auto stats = smoothed_stats(fwd, bwd, inst.a, obs);
    const auto oracle = enumerate_likelihood(inst.mu, inst.a, obs);

    CAPTURE(k);
    REQUIRE(oracle.likelihood > 0.0);
    CHECK(tg::relative_error(std::exp(fwd.log_likelihood()), oracle.likelihood) < 1e-9);
    for (std::size_t t = 0; t < obs.length(); ++t) {
      CHECK(tg::max_abs_diff(stats.gamma[t], oracle.posterior[t]) < 1e-10);
      const auto prefix = enumerate_likelihood(inst.mu, inst.a, obs.prefix(t + 1));
      CHECK(tg::max_abs_diff(filtered_posterior(fwd, t), prefix.posterior[t]) < 1e-10);
      const Vector matrix_form = alpha_matrix_form(inst.mu, inst.a, obs, t);
      const Vector recursive = unscaled_alpha(fwd, t);
      for (std::size_t i = 0; i < matrix_form.size(); ++i) {
        CHECK(std::abs(matrix_form[i] - recursive[i]) <= 1e-9 * std::max(matrix_form[i], 1e-300));
      }
    }
    for (std::size_t t = 1; t < obs.length(); ++t) {
      const auto xi = pair_posterior(fwd, bwd, inst.a, obs, t);
      for (std::size_t i = 0; i < xi.size(); ++i) CHECK(tg::max_abs_diff(xi[i], oracle.joint[t - 1][i]) < 1e-10);
    }
  }
}

TEST_CASE("posteriors are distributions and gamma is the marginal of xi") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto inst = tg::random_instance(rng, 6, 12, 1, 2);
    const auto& obs = inst.sequences[0];
    const auto fwd = forward(inst.mu, inst.a, obs);
    const auto bwd = backward(inst.a, obs, fwd);
    const auto stats = smoothed_stats(fwd, bwd, inst.a, obs);
    for (const auto& g : stats.gamma) {
      double s = 0.0;
      for (double x : g) s += x;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (std::size_t t = 1; t < obs.length(); ++t) {
      const auto xi = pair_posterior(fwd, bwd, inst.a, obs, t);
      for (std::size_t i = 0; i < xi.size(); ++i) {
        double row = 0.0;
        for (double x : xi[i]) row += x;
        CHECK(row == doctest::Approx(stats.gamma[t - 1][i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("direct sighting makes the filtered belief one-hot") {
  const auto a = chain3();
  const ObservationSequence obs({ones(3), ObservationVector::direct_sighting(3, 1)});
  const auto fwd = forward(InitialDistribution::uniform(3), a, obs);
  CHECK(filtered_posterior(fwd, 1) == Vector{0, 1, 0});
}

TEST_CASE("fully observed walk: one iteration gives count frequencies") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = tg::uniform_index(rng, 2, 6);
    const auto truth = tg::random_transition(rng, n);
    const auto mu = InitialDistribution::uniform(n);
    std::vector<ObservationSequence> seqs;
    std::vector<Vector> counts(n, Vector(n, 0.0));
    for (int m = 0; m < 3; ++m) {
      std::vector<ObservationVector> steps;
      std::size_t x = tg::uniform_index(rng, 0, n - 1);
      steps.push_back(ObservationVector::direct_sighting(n, x));
      for (int t = 1; t < 15; ++t) {
        const std::size_t y = tg::sample(rng, truth.row(x));
        counts[x][y] += 1.0;
        x = y;
        steps.push_back(ObservationVector::direct_sighting(n, x));
      }
      seqs.emplace_back(std::move(steps));
    }
    const auto a0 = TransitionMatrix::from_rows(std::vector<Vector>(n, Vector(n, 1.0 / n)));
    const auto result = baum_welch(seqs, mu, a0, {.max_iters = 1, .tol = 0.0, .smoothing_eps = 0.0});
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (double c : counts[i]) total += c;
      for (std::size_t j = 0; j < n; ++j) {
        const double want = total > 0 ? counts[i][j] / total : a0(i, j);
        CHECK(std::abs(result.a_hat(i, j) - want) < 1e-9);
      }
    }
  }
}

TEST_CASE("EM never decreases the pooled likelihood and keeps rows stochastic") {
  std::mt19937_64 rng(424242);
  const BaumWelchOptions step{.max_iters = 1, .tol = 0.0, .smoothing_eps = 0.0};
  for (int k = 0; k < 50; ++k) {
    const std::size_t m = k % 2 == 0 ? 1 : 3;
    const auto inst = tg::random_instance(rng, 5, 8, m, 2);
    // Start from a random matrix on the true support so every sequence is possible.
    TransitionMatrix a = inst.a;
    double previous = pooled_log_likelihood(inst.sequences, inst.mu, a);
    for (int it = 0; it < 15; ++it) {
      a = baum_welch(inst.sequences, inst.mu, a, step).a_hat;
      const double ll = pooled_log_likelihood(inst.sequences, inst.mu, a);
      CAPTURE(k);
      CAPTURE(it);
      CHECK(ll >= previous - 1e-8);
      CHECK(tg::max_row_sum_error(a) <= 1e-12);
      previous = ll;
    }
  }
}

TEST_CASE("loglik trace agrees with re-evaluation") {
  std::mt19937_64 rng(8);
  const auto inst = tg::random_instance(rng, 5, 8, 3, 3);
  const auto res = baum_welch(inst.sequences, inst.mu, inst.a, {.max_iters = 10, .tol = 0.0, .smoothing_eps = 0.0});
  REQUIRE(res.loglik_trace.size() == static_cast<std::size_t>(res.iters) + 1);
  CHECK(res.loglik_trace.back() ==
        doctest::Approx(pooled_log_likelihood(inst.sequences, inst.mu, res.a_hat)).epsilon(1e-12));
  for (std::size_t i = 1; i < res.loglik_trace.size(); ++i) CHECK(res.loglik_trace[i] >= res.loglik_trace[i - 1] - 1e-8);
}

TEST_CASE("m identical copies give the single-sequence estimate") {
  std::mt19937_64 rng(31337);
  for (int k = 0; k < 50; ++k) {
    const auto inst = tg::random_instance(rng, 5, 8, 1, 2);
    const std::vector<ObservationSequence> copies(3, inst.sequences[0]);
    const BaumWelchOptions opts{.max_iters = 20, .tol = 0.0, .smoothing_eps = 0.0};
    const auto one = baum_welch(inst.sequences, inst.mu, inst.a, opts);
    const auto three = baum_welch(copies, inst.mu, inst.a, opts);
    CHECK(one.a_hat.max_abs_difference(three.a_hat) <= 1e-12);
  }
}

TEST_CASE("inconsistent sequences are named") {
  const auto a = chain3();
  const auto mu = InitialDistribution::point_mass(3, 0);
  const std::vector<ObservationSequence> seqs{ObservationSequence({ones(3), ones(3)}),
                                              ObservationSequence({ones(3), ObservationVector::direct_sighting(3, 2)})};
  try {
    baum_welch(seqs, mu, a);
    FAIL("expected InconsistentObservations");
  } catch (const InconsistentObservations& e) {
    CHECK(e.sequence() == 1);
    CHECK(e.step() == 1);
  }
  CHECK(std::isinf(pooled_log_likelihood(seqs, mu, a)));
}

TEST_CASE("smoothing keeps every in-support entry positive") {
  const auto a = chain3();
  const auto mu = InitialDistribution::point_mass(3, 0);
  std::vector<ObservationVector> steps;
  for (int t = 0; t < 6; ++t) steps.push_back(ObservationVector::direct_sighting(3, 0));
  const std::vector<ObservationSequence> seqs{ObservationSequence(steps)};
  const auto res = baum_welch(seqs, mu, a, {.max_iters = 50, .tol = 1e-12, .smoothing_eps = 1e-6});
  CHECK(res.a_hat(0, 1) > 0.0);
  CHECK(res.a_hat(0, 0) > 0.99);
  CHECK(res.a_hat(0, 2) == 0.0);
  // Row 2 never has expected outgoing mass and keeps its prior values.
  CHECK(res.a_hat(2, 1) == a(2, 1));
}
