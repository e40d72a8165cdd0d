#pragma once

#include <json.hpp>

#include "hom/montecarlo.hpp"
#include "hom/version.hpp"

namespace hom {

inline nlohmann::json to_json(const PhotonPairConfig& cfg) {
  return {{"delta_tau", cfg.delta_tau},
          {"delta", cfg.delta},
          {"omega_mean", cfg.omega_mean},
          {"delta_omega", cfg.delta_omega}};
}

/// Sidecar metadata that accompanies an event-log CSV.
inline nlohmann::json event_log_sidecar(const EventLog& log) {
  return {{"config", to_json(log.config)},
          {"family", log.family},
          {"seed", log.seed},
          {"rng", log.rng},
          {"chunk_size", log.chunk_size},
          {"n_pairs", log.n_pairs()},
          {"version", version}};
}

}  // namespace hom
