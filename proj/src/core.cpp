#include "hawkes/core.hpp"

#include <cmath>
#include <numeric>

namespace hawkes {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NegativeRate: return "NegativeRate";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptyStream: return "EmptyStream";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
        case ErrorCode::DimOutOfRange: return "DimOutOfRange";
        case ErrorCode::SafetyCapExceeded: return "SafetyCapExceeded";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::LikelihoodDecrease: return "LikelihoodDecrease";
        case ErrorCode::ShapeTooSmall: return "ShapeTooSmall";
        case ErrorCode::TooFewResamples: return "TooFewResamples";
        case ErrorCode::NonPositiveEstimate: return "NonPositiveEstimate";
        case ErrorCode::DegenerateChain: return "DegenerateChain";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

namespace {

std::optional<ValidationIssue> check_matrix_shape(const Matrix& m, std::size_t dims,
                                                  const char* label) {
    if (m.size() != dims) {
        return ValidationIssue{ErrorCode::ShapeMismatch,
                               std::string(label) + " has " + std::to_string(m.size()) +
                                   " rows, expected " + std::to_string(dims)};
    }
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (m[p].size() != dims) {
            return ValidationIssue{ErrorCode::ShapeMismatch,
                                   std::string(label) + " row " + std::to_string(p) + " has " +
                                       std::to_string(m[p].size()) + " columns, expected " +
                                       std::to_string(dims)};
        }
    }
    return std::nullopt;
}

std::string entry_name(const char* label, std::size_t p, std::size_t q) {
    return std::string(label) + "[" + std::to_string(p) + "][" + std::to_string(q) + "]";
}

} // namespace

std::optional<ValidationIssue> validate(const HawkesParams& params) {
    const std::size_t dims = params.dims();
    if (dims == 0) {
        return ValidationIssue{ErrorCode::ShapeMismatch, "mu is empty, need M >= 1"};
    }
    for (std::size_t p = 0; p < dims; ++p) {
        const double v = params.mu[p];
        if (!std::isfinite(v)) {
            return ValidationIssue{ErrorCode::NonFinite, "mu[" + std::to_string(p) + "]"};
        }
        if (v < 0.0) {
            return ValidationIssue{ErrorCode::NegativeRate,
                                   "mu[" + std::to_string(p) + "] = " + std::to_string(v)};
        }
    }
    if (auto issue = check_matrix_shape(params.alpha, dims, "alpha")) return issue;
    for (std::size_t p = 0; p < dims; ++p) {
        for (std::size_t q = 0; q < dims; ++q) {
            const double v = params.alpha[p][q];
            if (!std::isfinite(v)) {
                return ValidationIssue{ErrorCode::NonFinite, entry_name("alpha", p, q)};
            }
            if (v < 0.0) {
                return ValidationIssue{ErrorCode::NegativeRate,
                                       entry_name("alpha", p, q) + " = " + std::to_string(v)};
            }
        }
    }
    if (params.beta.is_shared()) {
        const double v = params.beta.shared();
        if (!std::isfinite(v)) return ValidationIssue{ErrorCode::NonFinite, "beta"};
        if (v <= 0.0) {
            return ValidationIssue{ErrorCode::NegativeRate, "beta = " + std::to_string(v)};
        }
    } else {
        const Matrix& b = std::get<Matrix>(params.beta.value);
        if (auto issue = check_matrix_shape(b, dims, "beta")) return issue;
        for (std::size_t p = 0; p < dims; ++p) {
            for (std::size_t q = 0; q < dims; ++q) {
                const double v = b[p][q];
                if (!std::isfinite(v)) {
                    return ValidationIssue{ErrorCode::NonFinite, entry_name("beta", p, q)};
                }
                if (v <= 0.0) {
                    return ValidationIssue{ErrorCode::NegativeRate,
                                           entry_name("beta", p, q) + " = " + std::to_string(v)};
                }
            }
        }
    }
    return std::nullopt;
}

void validate_or_throw(const HawkesParams& params) {
    if (auto issue = validate(params)) fail(issue->code, issue->message);
}

void validate_stream(const EventStream& stream, std::size_t dims) {
    double prev = -1.0;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const Event& e = stream.events[i];
        if (!std::isfinite(e.t) || e.t < 0.0) {
            fail(ErrorCode::NonFinite, "event " + std::to_string(i) + " in realization '" +
                                           stream.realization_id + "' has time " +
                                           std::to_string(e.t));
        }
        if (i > 0 && e.t <= prev) {
            fail(ErrorCode::NonMonotoneTime,
                 "realization '" + stream.realization_id + "' event " + std::to_string(i) +
                     " at t=" + std::to_string(e.t) + " does not increase past " +
                     std::to_string(prev));
        }
        if (e.dim >= dims) {
            fail(ErrorCode::DimOutOfRange, "realization '" + stream.realization_id + "' event " +
                                               std::to_string(i) + " has dim " +
                                               std::to_string(e.dim) + " >= M=" +
                                               std::to_string(dims));
        }
        prev = e.t;
    }
    if (!(stream.horizon > 0.0) || stream.horizon < stream.last_time()) {
        fail(ErrorCode::InvalidArgument, "realization '" + stream.realization_id +
                                             "' horizon " + std::to_string(stream.horizon) +
                                             " is not positive and >= the last event time");
    }
}

void validate_realizations(const RealizationSet& realizations, std::size_t dims) {
    if (realizations.empty()) fail(ErrorCode::EmptyInput, "realization set is empty");
    for (const auto& stream : realizations) validate_stream(stream, dims);
}

namespace {

// Power iteration for the nonnegative ratio matrix, M > 2.
double power_iteration_radius(const Matrix& m) {
    const std::size_t n = m.size();
    std::vector<double> v(n, 1.0), w(n, 0.0);
    double lambda = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        double norm = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            double s = 0.0;
            for (std::size_t q = 0; q < n; ++q) s += m[p][q] * v[q];
            w[p] = s;
            norm = std::max(norm, std::abs(s));
        }
        if (norm == 0.0) return 0.0;
        double next = 0.0;
        double dot_vv = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            next += w[p] * v[p];
            dot_vv += v[p] * v[p];
            v[p] = w[p] / norm;
        }
        next /= dot_vv;
        if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) return std::abs(next);
        lambda = next;
    }
    return std::abs(lambda);
}

} // namespace

double spectral_radius(const HawkesParams& params) {
    validate_or_throw(params);
    const std::size_t n = params.dims();
    Matrix ratio(n, std::vector<double>(n, 0.0));
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            ratio[p][q] = params.alpha[p][q] / params.beta.at(p, q);
        }
    }
    if (n == 1) return ratio[0][0];
    if (n == 2) {
        const double a = ratio[0][0], b = ratio[0][1], c = ratio[1][0], d = ratio[1][1];
        // Characteristic roots of [[a,b],[c,d]]; bc >= 0 keeps them real.
        const double mean = 0.5 * (a + d);
        const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
        return std::max(std::abs(mean + disc), std::abs(mean - disc));
    }
    return power_iteration_radius(ratio);
}

bool is_stationary(const HawkesParams& params) { return spectral_radius(params) < 1.0; }

double intensity_at(const HawkesParams& params, const EventStream& stream, std::size_t p,
                    double t) {
    validate_or_throw(params);
    if (p >= params.dims()) fail(ErrorCode::DimOutOfRange, "dimension index " + std::to_string(p));
    if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "intensity time must be nonnegative");
    double lambda = params.mu[p];
    for (const Event& e : stream.events) {
        if (e.t >= t) break;  // history is strictly before t
        lambda += params.alpha[p][e.dim] * std::exp(-params.beta.at(p, e.dim) * (t - e.t));
    }
    return lambda;
}

InfluenceDirection influence_direction(const Matrix& alpha, std::size_t p, std::size_t q) {
    if (p == q) fail(ErrorCode::InvalidArgument, "influence_direction requires p != q");
    if (p >= alpha.size() || q >= alpha.size()) {
        fail(ErrorCode::DimOutOfRange, "influence_direction index out of range");
    }
    const double pq = alpha[p][q];
    const double qp = alpha[q][p];
    if (pq > qp) return InfluenceDirection::QDrivesP;
    if (pq < qp) return InfluenceDirection::PDrivesQ;
    return InfluenceDirection::Tie;
}

} // namespace hawkes
