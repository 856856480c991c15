#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hawkes/cli.hpp"
#include "hawkes/io.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/sim.hpp"
#include "test_util.hpp"

using namespace hawkes;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("hawkes_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("event CSV round trip is the identity on the events") {
    Rng rng(3);
    const auto dir = temp_dir("roundtrip");
    for (int rep = 0; rep < 20; ++rep) {
        RealizationSet batch;
        const std::size_t reps = 1 + rng.index(4);
        for (std::size_t k = 0; k < reps; ++k) {
            auto s = test::random_stream(rng, 1 + rng.index(40), 3, 0.8);
            s.realization_id = "r" + std::to_string(k);
            s.horizon = s.last_time();  // the CSV carries events only
            batch.push_back(std::move(s));
        }
        const auto path = dir / "events.csv";
        io::write_events_csv(path, batch);
        const RealizationSet parsed = io::parse_events(path, 3);
        REQUIRE(parsed.size() == batch.size());
        for (std::size_t k = 0; k < batch.size(); ++k) {
            CHECK(parsed[k].realization_id == batch[k].realization_id);
            REQUIRE(parsed[k].size() == batch[k].size());
            CHECK(parsed[k].horizon == batch[k].horizon);
            for (std::size_t i = 0; i < batch[k].size(); ++i) {
                CHECK(parsed[k].events[i].t == batch[k].events[i].t);
                CHECK(parsed[k].events[i].dim == batch[k].events[i].dim);
            }
        }
    }
}

TEST_CASE("event CSV parsing failure modes carry line numbers") {
    const auto dir = temp_dir("parse_errors");

    write_file(dir / "empty.csv", "");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "empty.csv", 1),
                         doctest::Contains("EmptyInput"), Error);

    write_file(dir / "header_only.csv", "realization_id,dim,t\n");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "header_only.csv", 1),
                         doctest::Contains("EmptyInput"), Error);

    write_file(dir / "bad_header.csv", "id,dim,t\n0,0,1.0\n");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "bad_header.csv", 1),
                         doctest::Contains(":1:"), Error);

    write_file(dir / "dup.csv", "realization_id,dim,t\n0,0,1.0\n0,0,1.0\n");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "dup.csv", 1),
                         doctest::Contains("NonMonotoneTime"), Error);

    write_file(dir / "dim.csv", "realization_id,dim,t\n0,2,1.0\n");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "dim.csv", 2),
                         doctest::Contains("DimOutOfRange"), Error);

    write_file(dir / "fields.csv", "realization_id,dim,t\n0,0\n");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "fields.csv", 1),
                         doctest::Contains(":2:"), Error);

    write_file(dir / "badnum.csv", "realization_id,dim,t\n0,0,abc\n");
    CHECK_THROWS_WITH_AS((void)io::parse_events(dir / "badnum.csv", 1),
                         doctest::Contains("bad time"), Error);

    write_file(dir / "late.csv", "realization_id,dim,t\n0,0,1.0\n0,0,5.0\n");
    CHECK_THROWS_AS((void)io::parse_events(dir / "late.csv", 1, 2.0), Error);
    const auto with_horizon = io::parse_events(dir / "late.csv", 1, 9.0);
    CHECK(with_horizon.front().horizon == 9.0);
}

TEST_CASE("parameter JSON accepts scalar and matrix decay") {
    const auto dir = temp_dir("params");
    write_file(dir / "p.json", R"({"mu":[0.1],"alpha":[[0.5]],"beta":1.2})");
    const HawkesParams p = io::parse_params(dir / "p.json");
    CHECK(p.dims() == 1);
    CHECK(p.beta.is_shared());
    CHECK(p.beta.shared() == 1.2);

    write_file(dir / "m.json",
               R"({"mu":[0.1,0.5],"alpha":[[0.1,0.7],[0.7,0.2]],"beta":[[1.0,2.0],[3.0,4.0]]})");
    const HawkesParams m = io::parse_params(dir / "m.json");
    CHECK_FALSE(m.beta.is_shared());
    CHECK(m.beta.at(1, 0) == 3.0);

    write_file(dir / "bad.json", R"({"mu":[0.1],"alpha":[[0.5],[0.2]],"beta":1.0})");
    CHECK_THROWS_WITH_AS((void)io::parse_params(dir / "bad.json"),
                         doctest::Contains("ShapeMismatch"), Error);

    write_file(dir / "nf.json", R"({"mu":[0.1]})");
    CHECK_THROWS_WITH_AS((void)io::parse_params(dir / "nf.json"),
                         doctest::Contains("ParseError"), Error);

    // Round trip through the writer.
    write_file(dir / "rt.json", io::params_to_json(m));
    const HawkesParams rt = io::parse_params(dir / "rt.json");
    CHECK(rt.alpha[0][1] == m.alpha[0][1]);
    CHECK(rt.beta.at(1, 1) == m.beta.at(1, 1));
}

TEST_CASE("estimates JSON round trip") {
    const auto dir = temp_dir("estimates");
    DecayEstimates est;
    est.values = {0.5, 1.25, 2.0};
    est.method = "grid";
    est.realization_counts = {1, 2, 3};
    io::write_estimates_json(dir / "e.json", est);
    const DecayEstimates parsed = io::parse_estimates(dir / "e.json");
    CHECK(parsed.values == est.values);
    CHECK(parsed.method == est.method);
    CHECK(parsed.realization_counts == est.realization_counts);

    write_file(dir / "none.json", R"({"method":"x"})");
    CHECK_THROWS_AS((void)io::parse_estimates(dir / "none.json"), Error);
}

TEST_CASE("format_double round trips through parsing") {
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const double x = std::exp(rng.uniform(-20.0, 20.0)) * (rng.uniform() < 0.5 ? -1 : 1);
        const std::string text = io::format_double(x);
        CHECK(std::stod(text) == x);
    }
}

TEST_CASE("manifest hash changes iff any input byte changes") {
    const std::string base = "hawkes input bytes";
    const auto h0 = io::fnv1a(base);
    CHECK(h0 == io::fnv1a(base));
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::string mutated = base;
        mutated[i] = mutated[i] == 'x' ? 'y' : 'x';
        CHECK(io::fnv1a(mutated) != h0);
    }
}

TEST_CASE("scan CSV layout") {
    ScanResult scan;
    scan.beta_grid = {0.5, 1.0};
    scan.mean_negloglik = {10.0, 9.0};
    scan.ci_low = {9.5, 8.5};
    scan.ci_high = {10.5, 9.5};
    const std::string csv = io::scan_to_csv(scan);
    CHECK(csv.substr(0, 36) == "beta,mean_negloglik,ci_low,ci_high\n0");
    CHECK(csv.find("1,9,8.5,9.5\n") != std::string::npos);
}

// --------------------------------------------------------------------------
// CLI dispatch
// --------------------------------------------------------------------------

TEST_CASE("unknown subcommands and missing seeds exit with code 1") {
    CHECK(cli::dispatch({"frobnicate"}) == 1);
    const auto dir = temp_dir("cli_errors");
    write_file(dir / "p.json", R"({"mu":[0.1],"alpha":[[0.5]],"beta":1.2})");
    CHECK(cli::dispatch({"sim", "--params", (dir / "p.json").string(), "--horizon", "10",
                         "--out", (dir / "out").string()}) == 1);
}

TEST_CASE("nonstationary simulation is refused with the spectral radius named") {
    const auto dir = temp_dir("cli_rho");
    write_file(dir / "p.json", R"({"mu":[0.5],"alpha":[[2.0]],"beta":1.0})");
    CHECK(cli::dispatch({"sim", "--params", (dir / "p.json").string(), "--horizon", "10",
                         "--seed", "1", "--out", (dir / "out").string()}) == 1);
    CHECK(cli::dispatch({"sim", "--params", (dir / "p.json").string(), "--events", "50",
                         "--seed", "1", "--allow-nonstationary", "--out",
                         (dir / "out").string()}) == 0);
    CHECK(fs::exists(dir / "out" / "events.csv"));
    CHECK(fs::exists(dir / "out" / "run_manifest.json"));
}

TEST_CASE("sim, scan, fit, bayes, and changepoint chain together") {
    const auto dir = temp_dir("cli_pipeline");
    write_file(dir / "p.json", R"({"mu":[0.3],"alpha":[[0.5]],"beta":1.2})");
    const auto events = (dir / "sim" / "events.csv").string();

    REQUIRE(cli::dispatch({"sim", "--params", (dir / "p.json").string(), "--horizon", "400",
                           "--reps", "10", "--seed", "42", "--out",
                           (dir / "sim").string()}) == 0);

    REQUIRE(cli::dispatch({"scan", "--params", (dir / "p.json").string(), "--events", events,
                           "--horizon", "400", "--grid-count", "12", "--seed", "1", "--out",
                           (dir / "scan").string()}) == 0);
    const std::string scan_csv = read_file(dir / "scan" / "scan.csv");
    CHECK(scan_csv.rfind("beta,", 0) == 0);

    REQUIRE(cli::dispatch({"fit", "--events", events, "--horizon", "400", "--method",
                           "nonlinear", "--sequential", "--seed", "7", "--out",
                           (dir / "fit").string()}) == 0);
    CHECK(fs::exists(dir / "fit" / "fit.json"));
    CHECK(fs::exists(dir / "fit" / "estimates.json"));

    REQUIRE(cli::dispatch({"bayes", "--estimates", (dir / "fit" / "estimates.json").string(),
                           "--b0", "1.5", "--seed", "3", "--out",
                           (dir / "bayes").string()}) == 0);
    const std::string bayes_json = read_file(dir / "bayes" / "bayes.json");
    CHECK(bayes_json.find("beta_prime") != std::string::npos);
    CHECK(bayes_json.find("beta_prime_conjugate") != std::string::npos);

    REQUIRE(cli::dispatch({"changepoint", "--estimates",
                           (dir / "fit" / "estimates.json").string(), "--samples", "4000",
                           "--burn-in", "1000", "--seed", "9", "--out",
                           (dir / "cp").string()}) == 0);
    CHECK(fs::exists(dir / "cp" / "samples.csv"));
    CHECK(fs::exists(dir / "cp" / "summary.json"));
}

TEST_CASE("reruns with identical seeds are byte-identical up to volatile fields") {
    const auto dir = temp_dir("cli_determinism");
    write_file(dir / "p.json", R"({"mu":[0.3],"alpha":[[0.4]],"beta":1.0})");

    const auto run = [&](const std::string& tag) {
        const auto out = dir / tag;
        REQUIRE(cli::dispatch({"sim", "--params", (dir / "p.json").string(), "--horizon",
                               "300", "--reps", "5", "--seed", "11", "--out",
                               (out / "sim").string()}) == 0);
        REQUIRE(cli::dispatch({"fit", "--events", (out / "sim" / "events.csv").string(),
                               "--horizon", "300", "--method", "grid", "--sequential",
                               "--seed", "2", "--out", (out / "fit").string()}) == 0);
        REQUIRE(cli::dispatch({"changepoint", "--estimates",
                               (out / "fit" / "estimates.json").string(), "--samples", "3000",
                               "--burn-in", "500", "--seed", "4", "--out",
                               (out / "cp").string()}) == 0);
    };
    run("a");
    run("b");

    const std::vector<std::string> files{"sim/events.csv", "fit/estimates.json",
                                         "cp/samples.csv", "cp/summary.json"};
    for (const auto& f : files) {
        CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
    }
    // fit.json matches after dropping the runtime line.
    const auto scrub = [](std::string text) {
        const auto pos = text.find("\"runtime_seconds\"");
        if (pos != std::string::npos) {
            const auto end = text.find('\n', pos);
            text.erase(pos, end - pos);
        }
        return text;
    };
    CHECK(scrub(read_file(dir / "a" / "fit" / "fit.json")) ==
          scrub(read_file(dir / "b" / "fit" / "fit.json")));
}

TEST_CASE("multiple chains and linear scan grids work through the CLI") {
    const auto dir = temp_dir("cli_variants");
    write_file(dir / "p.json", R"({"mu":[0.3],"alpha":[[0.5]],"beta":1.2})");
    REQUIRE(cli::dispatch({"sim", "--params", (dir / "p.json").string(), "--horizon", "300",
                           "--reps", "6", "--seed", "21", "--out",
                           (dir / "sim").string()}) == 0);
    REQUIRE(cli::dispatch({"scan", "--params", (dir / "p.json").string(), "--events",
                           (dir / "sim" / "events.csv").string(), "--horizon", "300",
                           "--grid-scale", "linear", "--grid-lo", "0.6", "--grid-hi", "2.4",
                           "--grid-count", "7", "--seed", "2", "--out",
                           (dir / "scan").string()}) == 0);
    const std::string scan_csv = read_file(dir / "scan" / "scan.csv");
    CHECK(scan_csv.find("\n0.6,") != std::string::npos);
    CHECK(scan_csv.find("\n2.4,") != std::string::npos);

    write_file(dir / "est.json", R"({"values":[0.5,0.6,0.7,1.9,2.0,2.1],"method":"x"})");
    REQUIRE(cli::dispatch({"changepoint", "--estimates", (dir / "est.json").string(),
                           "--samples", "2000", "--burn-in", "500", "--chains", "3", "--seed",
                           "5", "--out", (dir / "cp").string()}) == 0);
    const std::string samples = read_file(dir / "cp" / "samples.csv");
    CHECK(samples.rfind("chain,iter,b1,b2,kappa\n", 0) == 0);
    CHECK(samples.find("\n2,0,") != std::string::npos);  // third chain present
    const std::string summary = read_file(dir / "cp" / "summary.json");
    CHECK(summary.find("\"chain\": 2") != std::string::npos);
}

TEST_CASE("two-regime pipeline reproduces the frozen end-to-end summary") {
    const auto dir = temp_dir("cli_golden");
    write_file(dir / "p1.json", R"({"mu":[1.2],"alpha":[[0.6]],"beta":0.8})");
    write_file(dir / "p2.json", R"({"mu":[1.2],"alpha":[[0.6]],"beta":1.8})");
    REQUIRE(cli::dispatch({"sim", "--params", (dir / "p1.json").string(), "--events", "100",
                           "--reps", "15", "--seed", "101", "--out",
                           (dir / "s1").string()}) == 0);
    REQUIRE(cli::dispatch({"sim", "--params", (dir / "p2.json").string(), "--events", "100",
                           "--reps", "15", "--seed", "202", "--out",
                           (dir / "s2").string()}) == 0);
    {
        std::ifstream a(dir / "s1" / "events.csv"), b(dir / "s2" / "events.csv");
        std::ofstream m(dir / "events.csv");
        std::string line;
        while (std::getline(a, line)) m << line << "\n";
        std::getline(b, line);  // drop the second header
        while (std::getline(b, line)) {
            const auto c = line.find(',');
            m << (std::stoul(line.substr(0, c)) + 15) << line.substr(c) << "\n";
        }
    }
    REQUIRE(cli::dispatch({"fit", "--events", (dir / "events.csv").string(), "--method",
                           "nonlinear", "--iid", "--beta-lo", "0.1", "--beta-hi", "5",
                           "--seed", "7", "--out", (dir / "fit").string()}) == 0);
    REQUIRE(cli::dispatch({"bayes", "--estimates", (dir / "fit" / "estimates.json").string(),
                           "--b0", "1.0", "--seed", "3", "--out",
                           (dir / "bayes").string()}) == 0);
    REQUIRE(cli::dispatch({"changepoint", "--estimates",
                           (dir / "fit" / "estimates.json").string(), "--samples", "8000",
                           "--burn-in", "2000", "--seed", "11", "--out",
                           (dir / "cp").string()}) == 0);

    // Golden values frozen from this pipeline under these exact seeds.
    const std::string bayes_json = read_file(dir / "bayes" / "bayes.json");
    CHECK(bayes_json.find("\"beta_prime\": 2.058647208418678") != std::string::npos);
    CHECK(bayes_json.find("\"b\": 59.700769044141666") != std::string::npos);
    const std::string summary_json = read_file(dir / "cp" / "summary.json");
    CHECK(summary_json.find("\"beta1_bar\": 1.2498988456083027") != std::string::npos);
    CHECK(summary_json.find("\"beta2_bar\": 2.375609779413819") != std::string::npos);
    CHECK(summary_json.find("\"kappa_hat\": 11.0") != std::string::npos);
    CHECK(summary_json.find("\"ordered\": true") != std::string::npos);
    const std::string samples_csv = read_file(dir / "cp" / "samples.csv");
    CHECK(samples_csv.rfind("iter,b1,b2,kappa\n", 0) == 0);
}

TEST_CASE("exit code 2 signals numerical failure") {
    const auto dir = temp_dir("cli_exit2");
    // A changepoint run rejects nonpositive estimates with exit 1 (validation).
    write_file(dir / "bad.json", R"({"values":[1.0,-1.0],"method":"x"})");
    CHECK(cli::dispatch({"changepoint", "--estimates", (dir / "bad.json").string(), "--seed",
                         "1", "--out", (dir / "out").string()}) == 1);
}

TEST_CASE("version flag prints and exits cleanly") {
    CHECK(cli::dispatch({"--version"}) == 0);
}
