#include "repeater/cli.hpp"
#include "repeater/config.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace repeater;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("repeater_cli_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kTrivialChain = R"({
  "version": 1,
  "hardware": {"p_gen": 1.0, "p_swap": 1.0, "w0": 0.95, "t_coh": "inf"},
  "eval": {"ttr": 4, "backend": "direct"},
  "nested_swap": {"levels": 1}
})";

const char* kSmallChain = R"({
  "version": 1,
  "hardware": {"p_gen": 0.5, "p_swap": 0.5, "w0": 0.98, "t_coh": 100},
  "eval": {"ttr": 256, "backend": "fast"},
  "nested_swap": {"levels": 1, "strategy": "dif_time", "cutoffs": [10]}
})";

} // namespace

TEST_CASE("evaluate writes the deterministic chain as a single CSV row") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    const std::string out = dir.file("dist.csv");
    write(config, kTrivialChain);

    const int code = cli::run({"evaluate", "--config", config, "--out", out});
    CHECK(code == 0);

    const std::string csv = slurp(out);
    CHECK(csv.find("t,pmf,cdf,werner,fidelity") == 0);
    CHECK(csv.find("1,1,1,0.90249999999999997,0.926875") != std::string::npos);

    const std::string meta = slurp(out + ".meta.json");
    CHECK(meta.find("\"config_hash\"") != std::string::npos);
    CHECK(meta.find("\"covered_mass\": 1.0") != std::string::npos);
}

TEST_CASE("missing config file exits with the config error code") {
    TempDir dir;
    const int code = cli::run(
        {"evaluate", "--config", dir.file("nope.json"), "--out", dir.file("x.csv")});
    CHECK(code == 2);
}

TEST_CASE("malformed config exits with the config error code") {
    TempDir dir;
    const std::string config = dir.file("bad.json");
    write(config, "{\"version\": 2}");
    const int code =
        cli::run({"evaluate", "--config", config, "--out", dir.file("x.csv")});
    CHECK(code == 2);
}

TEST_CASE("csv output round-trips through the reader") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    const std::string out = dir.file("dist.csv");
    write(config, kSmallChain);
    REQUIRE(cli::run({"evaluate", "--config", config, "--out", out}) == 0);

    const LinkState reread = cli::read_distribution_file(out);
    CHECK(reread.pmf.values.size() == 257);
    // values survive with full precision
    const ParsedConfig parsed = parse_config(slurp(config));
    const EvalResult direct = eval_protocol(*parsed.protocol, parsed.eval);
    for (std::size_t t = 0; t < reread.pmf.values.size(); ++t) {
        CHECK(reread.pmf[t] == direct.state.pmf[t]);
        CHECK(reread.werner[t] == direct.state.werner[t]);
    }
}

TEST_CASE("json output carries the distribution and the report") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    const std::string out = dir.file("dist.json");
    write(config, kSmallChain);
    REQUIRE(cli::run({"evaluate", "--config", config, "--out", out, "--format", "json"}) == 0);
    const LinkState reread = cli::read_distribution_file(out);
    CHECK(reread.pmf.values.size() == 257);
    CHECK(slurp(out).find("\"report\"") != std::string::npos);
}

TEST_CASE("sample then compare passes against the matching distribution") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    const std::string dist = dir.file("dist.csv");
    const std::string samples = dir.file("samples.json");
    write(config, kSmallChain);
    REQUIRE(cli::run({"evaluate", "--config", config, "--out", dist}) == 0);
    REQUIRE(cli::run({"sample", "--config", config, "--out", samples, "-n", "20000",
                      "--seed", "77"}) == 0);
    CHECK(cli::run({"compare", "--exact", dist, "--samples", samples}) == 0);
}

TEST_CASE("comparing against a shifted distribution fails with exit 1") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    const std::string samples = dir.file("samples.json");
    write(config, kSmallChain);
    REQUIRE(cli::run({"sample", "--config", config, "--out", samples, "-n", "20000",
                      "--seed", "78"}) == 0);

    // shift the exact distribution by one step before writing it out
    const ParsedConfig parsed = parse_config(kSmallChain);
    const EvalResult exact = eval_protocol(*parsed.protocol, parsed.eval);
    LinkState shifted;
    shifted.pmf = TruncatedPmf(parsed.eval.ttr);
    shifted.werner.assign(exact.state.werner.size(), 0.0);
    for (std::size_t t = 1; t + 1 < shifted.pmf.values.size(); ++t) {
        shifted.pmf[t + 1] = exact.state.pmf[t];
        shifted.werner[t + 1] = exact.state.werner[t];
    }
    const std::string dist = dir.file("shifted.csv");
    cli::write_distribution_csv(dist, shifted);

    CHECK(cli::run({"compare", "--exact", dist, "--samples", samples}) == 1);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    write(config, kSmallChain);
    const std::string a = dir.file("a.json");
    const std::string b = dir.file("b.json");
    REQUIRE(cli::run({"sample", "--config", config, "--out", a, "-n", "5000", "--seed",
                      "123"}) == 0);
    REQUIRE(cli::run({"sample", "--config", config, "--out", b, "-n", "5000", "--seed",
                      "123"}) == 0);
    auto strip_manifest = [](std::string text) {
        // drop the manifest (it contains the wall-clock duration)
        const auto pos = text.find("\"n\"");
        return text.substr(pos);
    };
    CHECK(strip_manifest(slurp(a)) == strip_manifest(slurp(b)));
}

TEST_CASE("optimize writes a usable report on a toy instance") {
    TempDir dir;
    const std::string config = dir.file("config.json");
    const std::string out = dir.file("report.json");
    write(config, R"({
      "version": 1,
      "hardware": {"p_gen": 0.3, "p_swap": 0.5, "w0": 0.97, "t_coh": 35},
      "eval": {"ttr": 600, "backend": "fast"},
      "nested_swap": {"levels": 1}
    })");
    REQUIRE(cli::run({"optimize", "--config", config, "--out", out, "--mode", "uniform",
                      "--seed", "7"}) == 0);
    const std::string report = slurp(out);
    CHECK(report.find("\"thresholds\"") != std::string::npos);
    CHECK(report.find("\"baseline_rate\"") != std::string::npos);

    // byte-identical report apart from the timing fields for a fixed seed
    const std::string out2 = dir.file("report2.json");
    REQUIRE(cli::run({"optimize", "--config", config, "--out", out2, "--mode", "uniform",
                      "--seed", "7"}) == 0);
    auto strip = [](std::string text) {
        const auto pos = text.find("\"mode\"");
        return text.substr(pos);
    };
    CHECK(strip(report) == strip(slurp(out2)));
}
