#include "hawkes/sim.hpp"

#include <cmath>
#include <string>

#include "hawkes/parallel.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

constexpr std::size_t kSafetyCap = 10'000'000;

} // namespace

EventStream simulate(const SimSpec& spec) {
    validate_or_throw(spec.params);
    const HawkesParams& params = spec.params;
    const std::size_t dims = params.dims();

    double horizon = 0.0;
    std::size_t target_count = 0;
    const bool count_mode = std::holds_alternative<StopAtCount>(spec.stop);
    if (count_mode) {
        target_count = std::get<StopAtCount>(spec.stop).count;
        if (target_count < 1) fail(ErrorCode::InvalidArgument, "event_count stop needs n >= 1");
    } else {
        horizon = std::get<StopAtHorizon>(spec.stop).horizon;
        if (!(horizon > 0.0)) fail(ErrorCode::InvalidArgument, "horizon stop needs T > 0");
    }

    Rng rng(spec.seed);
    EventStream out;

    // state[p][q] = decayed kernel sum of past dim-q events on dimension p.
    Matrix state(dims, std::vector<double>(dims, 0.0));
    std::vector<double> lambda(params.mu);
    double total = 0.0;
    for (double v : lambda) total += v;
    double t = 0.0;

    if (total <= 0.0) {
        // No baseline and empty history: the process never starts.
        if (count_mode) fail(ErrorCode::InvalidArgument, "zero total intensity cannot reach n");
        out.horizon = horizon;
        return out;
    }

    while (true) {
        // Tight bound: intensity decays between events, so the intensity just
        // after the previous candidate dominates the next interval.
        const double bound = total;
        const double wait = rng.exponential(bound);
        double candidate = t + wait;
        if (candidate <= t) candidate = std::nextafter(t, std::numeric_limits<double>::max());
        if (!count_mode && candidate > horizon) break;

        const double dt = candidate - t;
        double candidate_total = 0.0;
        for (std::size_t p = 0; p < dims; ++p) {
            double lp = params.mu[p];
            for (std::size_t q = 0; q < dims; ++q) {
                state[p][q] *= std::exp(-params.beta.at(p, q) * dt);
                lp += params.alpha[p][q] * state[p][q];
            }
            lambda[p] = lp;
            candidate_total += lp;
        }
        t = candidate;

        if (rng.uniform() * bound <= candidate_total) {
            // Accept and attribute a dimension proportionally to lambda_p.
            std::size_t dim = dims - 1;
            double threshold = rng.uniform() * candidate_total;
            double cumulative = 0.0;
            for (std::size_t p = 0; p < dims; ++p) {
                cumulative += lambda[p];
                if (threshold <= cumulative) {
                    dim = p;
                    break;
                }
            }
            out.events.push_back({t, dim});
            if (out.events.size() > kSafetyCap) {
                fail(ErrorCode::SafetyCapExceeded,
                     "more than 1e7 events generated; parameters are likely supercritical");
            }
            candidate_total = 0.0;
            for (std::size_t p = 0; p < dims; ++p) {
                state[p][dim] += 1.0;
                lambda[p] += params.alpha[p][dim];
                candidate_total += lambda[p];
            }
            if (count_mode && out.events.size() >= target_count) break;
        }
        total = candidate_total;
        if (total <= 0.0) {
            if (count_mode) {
                fail(ErrorCode::InvalidArgument,
                     "intensity decayed to zero before reaching the requested count");
            }
            break;
        }
    }

    out.horizon = count_mode ? out.last_time() : horizon;
    if (out.horizon <= 0.0) out.horizon = count_mode ? 1.0 : horizon;
    return out;
}

RealizationSet simulate_batch(const SimSpec& spec, std::size_t reps, std::uint64_t base_seed) {
    if (reps == 0) fail(ErrorCode::EmptyInput, "simulate_batch needs reps >= 1");
    RealizationSet out(reps);
    parallel_for(reps, [&](std::size_t k) {
        SimSpec local = spec;
        local.seed = base_seed + k;
        out[k] = simulate(local);
        out[k].realization_id = std::to_string(k);
    });
    return out;
}

} // namespace hawkes
