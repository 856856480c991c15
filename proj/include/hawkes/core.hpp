#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hawkes/errors.hpp"

namespace hawkes {

using Matrix = std::vector<std::vector<double>>;

// Decay is either one rate shared by every (p,q) pair or a full M x M
// matrix. Fitting paths require the shared form; evaluation accepts both.
struct Decay {
    std::variant<double, Matrix> value;

    Decay() : value(1.0) {}
    Decay(double shared) : value(shared) {}             // NOLINT(google-explicit-constructor)
    Decay(Matrix per_pair) : value(std::move(per_pair)) {} // NOLINT(google-explicit-constructor)

    bool is_shared() const { return std::holds_alternative<double>(value); }
    double shared() const { return std::get<double>(value); }

    double at(std::size_t p, std::size_t q) const {
        if (is_shared()) return std::get<double>(value);
        return std::get<Matrix>(value)[p][q];
    }
};

struct HawkesParams {
    std::vector<double> mu;  // baseline rates, events per unit time
    Matrix alpha;            // intensity jumps, alpha[p][q] = effect of q on p
    Decay beta;              // decay rates, 1/time

    std::size_t dims() const { return mu.size(); }

    static HawkesParams univariate(double mu, double alpha, double beta) {
        return HawkesParams{{mu}, {{alpha}}, Decay(beta)};
    }
};

struct Event {
    double t;
    std::size_t dim;
};

struct EventStream {
    std::vector<Event> events;  // strictly increasing in t
    double horizon = 0.0;       // observation end, >= last event time
    std::string realization_id;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
    double last_time() const { return events.empty() ? 0.0 : events.back().t; }
};

using RealizationSet = std::vector<EventStream>;

struct ValidationIssue {
    ErrorCode code;
    std::string message;
};

// Returns the first violated invariant, or nullopt when params are valid.
std::optional<ValidationIssue> validate(const HawkesParams& params);
void validate_or_throw(const HawkesParams& params);

// Checks strictly increasing times, dim < M, horizon >= last event.
void validate_stream(const EventStream& stream, std::size_t dims);
void validate_realizations(const RealizationSet& realizations, std::size_t dims);

// Largest-magnitude eigenvalue of the matrix alpha[p][q] / beta[p][q].
// Closed form for M <= 2, power iteration (tol 1e-10, 10000 iters) above.
double spectral_radius(const HawkesParams& params);

bool is_stationary(const HawkesParams& params);

// Conditional intensity of dimension p at time t given events strictly
// before t.
double intensity_at(const HawkesParams& params, const EventStream& stream, std::size_t p,
                    double t);

enum class InfluenceDirection {
    QDrivesP,  // alpha_pq > alpha_qp: q influences p more strongly
    PDrivesQ,  // alpha_pq < alpha_qp
    Tie,
};

InfluenceDirection influence_direction(const Matrix& alpha, std::size_t p, std::size_t q);

} // namespace hawkes
