#pragma once

#include <cstdint>
#include <variant>

#include "hawkes/core.hpp"

namespace hawkes {

struct StopAtHorizon {
    double horizon;
};
struct StopAtCount {
    std::size_t count;
};

struct SimSpec {
    HawkesParams params;
    std::variant<StopAtHorizon, StopAtCount> stop;
    std::uint64_t seed = 0;
};

// Ogata thinning with the tight per-candidate upper bound. Stationarity is
// not required; a hard cap of 1e7 generated events guards supercritical
// parameter sets. Deterministic given the seed.
EventStream simulate(const SimSpec& spec);

// Realization k uses seed = base_seed + k, so the batch is independent of
// evaluation order. realization_id is "0".."reps-1".
RealizationSet simulate_batch(const SimSpec& spec, std::size_t reps, std::uint64_t base_seed);

} // namespace hawkes
