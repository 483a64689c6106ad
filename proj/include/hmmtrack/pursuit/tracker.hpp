#pragma once

#include <cstddef>
#include <memory>

#include "hmmtrack/grid/grid_map.hpp"
#include "hmmtrack/hmm/types.hpp"

namespace hmmtrack::pursuit {

/// Running forward filter for one game. Updated by value through
/// ingest_observation; the belief is the normalized forward vector.
struct TrackerState {
  std::shared_ptr<const grid::GridMap> map;
  hmm::TransitionMatrix active_matrix;
  hmm::InitialDistribution mu;
  hmm::Vector running_alpha;
  double running_loglik = 0.0;
  int turn = 0;  // observations ingested so far
  /// Belief resets caused by observations impossible under the model.
  int collapse_events = 0;
  bool last_step_collapsed = false;

  const hmm::Vector& belief() const noexcept { return running_alpha; }
};

TrackerState init_tracker(std::shared_ptr<const grid::GridMap> map, hmm::InitialDistribution mu,
                          hmm::TransitionMatrix matrix);

/// One forward step. The first observation weights mu directly; later ones
/// propagate through the active matrix first. A step that zeroes the whole
/// vector resets the belief to uniform over the states the observation
/// leaves possible and is counted in collapse_events.
TrackerState ingest_observation(TrackerState tracker, const hmm::ObservationVector& obs);

/// Most probable state; ties go to the lowest state index.
std::size_t estimate_state(const TrackerState& tracker);
grid::Position estimate_position(const TrackerState& tracker);

}  // namespace hmmtrack::pursuit
