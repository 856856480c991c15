#include "hawkes/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hawkes::io {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    (void)ec;
    return std::string(buffer, ptr);
}

std::string events_to_csv(const RealizationSet& realizations) {
    std::string out = "realization_id,dim,t\n";
    for (const auto& stream : realizations) {
        for (const Event& e : stream.events) {
            out += stream.realization_id;
            out += ',';
            out += std::to_string(e.dim);
            out += ',';
            out += format_double(e.t);
            out += '\n';
        }
    }
    return out;
}

void write_events_csv(const std::filesystem::path& path, const RealizationSet& realizations) {
    atomic_write(path, events_to_csv(realizations));
}

RealizationSet parse_events(const std::filesystem::path& path, std::size_t dims,
                            std::optional<double> horizon) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        fail(ErrorCode::EmptyInput, "'" + path.string() + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "realization_id,dim,t") {
        fail(ErrorCode::ParseError,
             path.string() + ":1: expected header 'realization_id,dim,t', got '" + line + "'");
    }

    RealizationSet out;
    std::size_t line_no = 1;
    bool any_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                       : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            fail(ErrorCode::ParseError, where + ": expected three comma-separated fields");
        }
        const std::string id = line.substr(0, c1);
        const std::string dim_text = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string t_text = line.substr(c2 + 1);

        std::size_t dim = 0;
        {
            const auto [p, ec] =
                std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
            if (ec != std::errc() || p != dim_text.data() + dim_text.size()) {
                fail(ErrorCode::ParseError, where + ": bad dim '" + dim_text + "'");
            }
        }
        double t = 0.0;
        {
            const auto [p, ec] =
                std::from_chars(t_text.data(), t_text.data() + t_text.size(), t);
            if (ec != std::errc() || p != t_text.data() + t_text.size()) {
                fail(ErrorCode::ParseError, where + ": bad time '" + t_text + "'");
            }
        }
        if (dim >= dims) {
            fail(ErrorCode::DimOutOfRange,
                 where + ": dim " + std::to_string(dim) + " >= M=" + std::to_string(dims));
        }
        if (out.empty() || out.back().realization_id != id) {
            const auto seen = std::find_if(out.begin(), out.end(), [&](const EventStream& s) {
                return s.realization_id == id;
            });
            if (seen != out.end()) {
                fail(ErrorCode::ParseError,
                     where + ": realization '" + id + "' rows are not contiguous");
            }
            out.push_back(EventStream{{}, 0.0, id});
        }
        EventStream& stream = out.back();
        if (!stream.events.empty() && t <= stream.events.back().t) {
            fail(ErrorCode::NonMonotoneTime,
                 where + ": t=" + t_text + " does not increase within realization '" + id + "'");
        }
        stream.events.push_back({t, dim});
        any_row = true;
    }
    if (!any_row) fail(ErrorCode::EmptyInput, "'" + path.string() + "' has no event rows");

    for (auto& stream : out) {
        stream.horizon = horizon.value_or(stream.last_time());
        if (stream.horizon < stream.last_time()) {
            fail(ErrorCode::InvalidArgument,
                 "horizon " + format_double(*horizon) + " is below the last event of realization '" +
                     stream.realization_id + "'");
        }
        if (stream.horizon <= 0.0) stream.horizon = 1.0;
        validate_stream(stream, dims);
    }
    return out;
}

namespace {

json parse_json_or_fail(const std::string& text, const std::string& origin) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::ParseError, origin + ": invalid JSON");
    return doc;
}

} // namespace

HawkesParams params_from_json_text(const std::string& text, const std::string& origin) {
    const json doc = parse_json_or_fail(text, origin);
    if (!doc.contains("mu") || !doc.contains("alpha") || !doc.contains("beta")) {
        fail(ErrorCode::ParseError, origin + ": need keys mu, alpha, beta");
    }
    HawkesParams params;
    try {
        params.mu = doc.at("mu").get<std::vector<double>>();
        params.alpha = doc.at("alpha").get<Matrix>();
        const json& beta = doc.at("beta");
        if (beta.is_number()) {
            params.beta = Decay(beta.get<double>());
        } else {
            params.beta = Decay(beta.get<Matrix>());
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, origin + ": " + e.what());
    }
    validate_or_throw(params);
    return params;
}

HawkesParams parse_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return params_from_json_text(buffer.str(), path.string());
}

std::string params_to_json(const HawkesParams& params) {
    json doc;
    doc["mu"] = params.mu;
    doc["alpha"] = params.alpha;
    if (params.beta.is_shared()) {
        doc["beta"] = params.beta.shared();
    } else {
        doc["beta"] = std::get<Matrix>(params.beta.value);
    }
    return doc.dump(2) + "\n";
}

DecayEstimates parse_estimates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const json doc = parse_json_or_fail(buffer.str(), path.string());
    if (!doc.contains("values")) fail(ErrorCode::ParseError, path.string() + ": need key values");
    DecayEstimates out;
    try {
        out.values = doc.at("values").get<std::vector<double>>();
        out.method = doc.value("method", std::string("unknown"));
        if (doc.contains("realization_counts")) {
            out.realization_counts = doc.at("realization_counts").get<std::vector<std::size_t>>();
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    if (out.values.empty()) fail(ErrorCode::EmptyInput, path.string() + ": values is empty");
    return out;
}

std::string estimates_to_json(const DecayEstimates& estimates) {
    json doc;
    doc["values"] = estimates.values;
    doc["method"] = estimates.method;
    doc["realization_counts"] = estimates.realization_counts;
    return doc.dump(2) + "\n";
}

void write_estimates_json(const std::filesystem::path& path, const DecayEstimates& estimates) {
    atomic_write(path, estimates_to_json(estimates));
}

std::string scan_to_csv(const ScanResult& scan) {
    std::string out = "beta,mean_negloglik,ci_low,ci_high\n";
    for (std::size_t i = 0; i < scan.beta_grid.size(); ++i) {
        out += format_double(scan.beta_grid[i]);
        out += ',';
        out += format_double(scan.mean_negloglik[i]);
        out += ',';
        out += format_double(scan.ci_low[i]);
        out += ',';
        out += format_double(scan.ci_high[i]);
        out += '\n';
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    std::filesystem::create_directories(dir);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::ParseError, "cannot write '" + tmp + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t state) {
    for (unsigned char c : bytes) {
        state ^= c;
        state *= 1099511628211ULL;
    }
    return state;
}

std::string manifest_to_json(const RunManifest& manifest) {
    json doc;
    doc["command_line"] = manifest.command_line;
    doc["config_hash"] = manifest.config_hash;
    doc["seed"] = manifest.seed;
    doc["tool_version"] = manifest.tool_version;
    doc["started_at"] = manifest.started_at;
    doc["finished_at"] = manifest.finished_at;
    doc["outputs"] = manifest.outputs;
    return doc.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& directory, const RunManifest& manifest) {
    atomic_write(directory / "run_manifest.json", manifest_to_json(manifest));
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

} // namespace hawkes::io
