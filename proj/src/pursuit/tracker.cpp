#include "hmmtrack/pursuit/tracker.hpp"

#include <cmath>

#include "hmmtrack/hmm/inference.hpp"

namespace hmmtrack::pursuit {

TrackerState init_tracker(std::shared_ptr<const grid::GridMap> map, hmm::InitialDistribution mu,
                          hmm::TransitionMatrix matrix) {
  if (!map) throw std::invalid_argument("init_tracker: null map");
  const std::size_t n = map->state_count();
  if (mu.size() != n || matrix.size() != n) {
    throw hmm::DimensionMismatch("init_tracker: model size does not match the map's state count");
  }
  hmm::Vector alpha = mu.values();
  return TrackerState{std::move(map), std::move(matrix), std::move(mu), std::move(alpha), 0.0, 0, 0, false};
}

TrackerState ingest_observation(TrackerState tracker, const hmm::ObservationVector& obs) {
  const std::size_t n = tracker.running_alpha.size();
  if (obs.size() != n) throw hmm::DimensionMismatch("ingest_observation: observation length differs from the map");

  hmm::Vector next;
  double total = 0.0;
  if (tracker.turn == 0) {
    next.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = tracker.mu[i] * obs[i];
      total += next[i];
    }
  } else {
    total = hmm::propagate(tracker.running_alpha, tracker.active_matrix, obs, next);
  }

  tracker.last_step_collapsed = !(total > 0.0);
  if (tracker.last_step_collapsed) {
    ++tracker.collapse_events;
    double possible = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = obs[i] > 0.0 ? 1.0 : 0.0;
      possible += next[i];
    }
    for (double& x : next) x /= possible;
  } else {
    for (double& x : next) x /= total;
    tracker.running_loglik += std::log(total);
  }
  tracker.running_alpha = std::move(next);
  ++tracker.turn;
  return tracker;
}

std::size_t estimate_state(const TrackerState& tracker) {
  const auto& b = tracker.running_alpha;
  std::size_t best = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] > b[best]) best = i;
  }
  return best;
}

grid::Position estimate_position(const TrackerState& tracker) {
  return tracker.map->position(estimate_state(tracker));
}

}  // namespace hmmtrack::pursuit
