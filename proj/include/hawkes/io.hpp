#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/estimators.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes::io {

// Shortest round-trip decimal representation (>= 15 significant digits on
// every serialized value).
std::string format_double(double value);

// Event CSV with header `realization_id,dim,t`, rows sorted by
// (realization_id, t).
std::string events_to_csv(const RealizationSet& realizations);
void write_events_csv(const std::filesystem::path& path, const RealizationSet& realizations);

// Parses and validates the event CSV. Streams keep file order; horizons
// default to each stream's last event time unless an override is given.
RealizationSet parse_events(const std::filesystem::path& path, std::size_t dims,
                            std::optional<double> horizon = std::nullopt);

// Parameter JSON: {"mu":[...], "alpha":[[...]], "beta": number | [[...]]}.
HawkesParams parse_params(const std::filesystem::path& path);
HawkesParams params_from_json_text(const std::string& text, const std::string& origin);
std::string params_to_json(const HawkesParams& params);

// DecayEstimates JSON: {"values":[...], "method":..., "realization_counts":[...]}.
DecayEstimates parse_estimates(const std::filesystem::path& path);
std::string estimates_to_json(const DecayEstimates& estimates);
void write_estimates_json(const std::filesystem::path& path, const DecayEstimates& estimates);

// ScanResult CSV: beta,mean_negloglik,ci_low,ci_high.
std::string scan_to_csv(const ScanResult& scan);

// Atomic write: temp file in the target directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// FNV-1a over all input bytes; manifest hashes change iff any input does.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t state = 14695981039346656037ULL);

struct RunManifest {
    std::string command_line;
    std::string config_hash;  // hex of fnv1a over args + input file bytes
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string started_at;   // ISO-8601 UTC
    std::string finished_at;
    std::vector<std::string> outputs;
};

std::string manifest_to_json(const RunManifest& manifest);
void write_manifest(const std::filesystem::path& directory, const RunManifest& manifest);

std::string iso8601_now();

} // namespace hawkes::io
