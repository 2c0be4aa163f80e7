#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <regex>

#include "helpers.hpp"
#include "rp/manifest.hpp"
#include "rp/metrics.hpp"
#include "rp/svg_plot.hpp"

using namespace rp;
using namespace rptest;
namespace fs = std::filesystem;

namespace {

// Runs the CLI with stdout/stderr captured to a file; returns the exit code.
int run_cli(const std::string& args, const std::string& log_path) {
    const std::string cmd = std::string(RPTEST_CLI_PATH) + " " + args + " > " + log_path + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Metrics CSV with the wall-clock column blanked, for byte comparisons.
std::string csv_without_seconds(const std::string& path) {
    std::string out;
    for (const auto& rec : parse_metrics_csv(path)) {
        MetricsRecord r = rec;
        r.seconds = 0.0;
        out += metrics_csv_row(r);
        out += '\n';
    }
    return out;
}

bool have_mnist() { return !mnist_dir().empty(); }

} // namespace

TEST_CASE("cli: ci-smoke RL run produces a complete run directory") {
    if (!have_mnist()) {
        MESSAGE("MNIST files not found; skipping CLI end-to-end cases");
        return;
    }
    setenv("REWARD_PROBE_DATA_DIR", mnist_dir().c_str(), 1);
    TempDir tmp("cli-rl");
    const std::string out = tmp.file("run");

    const int rc = run_cli("train-rl --preset ci-smoke --seed 7 --out " + out,
                           tmp.file("log.txt"));
    CHECK(rc == 0);
    CHECK(fs::exists(out + "/manifest.json"));
    CHECK(fs::exists(out + "/metrics.csv"));
    CHECK(fs::exists(out + "/checkpoint_final.rpnet"));

    const auto rows = parse_metrics_csv(out + "/metrics.csv");
    REQUIRE(rows.size() >= 1);
    CHECK(rows.back().test_error.has_value());

    const RunManifest m = RunManifest::read(out + "/manifest.json");
    CHECK(m.status == "completed");
    CHECK(m.ledger.agent_label_reads == 0);
    CHECK(m.ledger.env_label_reads == rows.back().steps);
    CHECK(m.dataset_digests.size() == 4);

    // Audit prints the zero-consumption verdict line.
    const int audit_rc = run_cli("audit " + out, tmp.file("audit.txt"));
    CHECK(audit_rc == 0);
    const std::string audit_log = read_file(tmp.file("audit.txt"));
    CHECK(audit_log.find("agent-side labels consumed: 0") != std::string::npos);

    // Plot renders deterministically.
    CHECK(run_cli("plot " + out, tmp.file("plot.txt")) == 0);
    REQUIRE(fs::exists(out + "/pr_proper_action.svg"));
    const std::string svg1 = read_file(out + "/pr_proper_action.svg");
    CHECK(run_cli("plot " + out, tmp.file("plot2.txt")) == 0);
    CHECK(read_file(out + "/pr_proper_action.svg") == svg1);
    CHECK(svg1.find("Pr{Proper Action}") != std::string::npos);
}

TEST_CASE("cli: identical seeds give identical metrics and checkpoints") {
    if (!have_mnist()) return;
    setenv("REWARD_PROBE_DATA_DIR", mnist_dir().c_str(), 1);
    TempDir tmp("cli-det");
    const std::string a = tmp.file("a"), b = tmp.file("b");
    REQUIRE(run_cli("train-rl --preset ci-smoke --seed 11 --out " + a, tmp.file("la.txt")) == 0);
    REQUIRE(run_cli("train-rl --preset ci-smoke --seed 11 --out " + b, tmp.file("lb.txt")) == 0);

    CHECK(csv_without_seconds(a + "/metrics.csv") == csv_without_seconds(b + "/metrics.csv"));
    CHECK(read_file(a + "/checkpoint_final.rpnet") == read_file(b + "/checkpoint_final.rpnet"));

    // A different seed must change the trajectory.
    const std::string c = tmp.file("c");
    REQUIRE(run_cli("train-rl --preset ci-smoke --seed 12 --out " + c, tmp.file("lc.txt")) == 0);
    CHECK(read_file(a + "/checkpoint_final.rpnet") != read_file(c + "/checkpoint_final.rpnet"));
}

TEST_CASE("cli: supervised smoke run consumes labels agent-side") {
    if (!have_mnist()) return;
    setenv("REWARD_PROBE_DATA_DIR", mnist_dir().c_str(), 1);
    TempDir tmp("cli-sup");
    const std::string out = tmp.file("run");
    REQUIRE(run_cli("train-supervised --preset ci-smoke --seed 3 --out " + out,
                    tmp.file("log.txt")) == 0);

    const RunManifest m = RunManifest::read(out + "/manifest.json");
    const auto rows = parse_metrics_csv(out + "/metrics.csv");
    CHECK(m.ledger.agent_label_reads == rows.back().steps);
    CHECK(m.ledger.env_label_reads == 0);

    const std::string audit_log_path = tmp.file("audit.txt");
    CHECK(run_cli("audit " + out, audit_log_path) == 0);
    CHECK(read_file(audit_log_path).find("supervised run") != std::string::npos);
}

TEST_CASE("cli: probe runs against a smoke checkpoint and raw pixels") {
    if (!have_mnist()) return;
    setenv("REWARD_PROBE_DATA_DIR", mnist_dir().c_str(), 1);
    TempDir tmp("cli-probe");
    const std::string out = tmp.file("run");
    REQUIRE(run_cli("train-rl --preset ci-smoke --seed 5 --out " + out, tmp.file("l.txt")) == 0);

    const std::string ckpt = out + "/checkpoint_final.rpnet";
    const std::string before = read_file(ckpt);
    CHECK(run_cli("probe --checkpoint " + ckpt + " --preset ci-smoke --seed 5", tmp.file("p.txt")) ==
          0);
    CHECK(fs::exists(out + "/probe_report.json"));
    CHECK(read_file(ckpt) == before); // probing froze the parameters

    const std::string report = read_file(out + "/probe_report.json");
    CHECK(report.find("probe_test_accuracy") != std::string::npos);
    CHECK(report.find("\"source_task\": \"digits\"") != std::string::npos);

    CHECK(run_cli("probe --raw-pixels --preset ci-smoke --seed 5 --out " + tmp.file("raw"),
                  tmp.file("praw.txt")) == 0);
    CHECK(fs::exists(tmp.file("raw") + "/probe_report.json"));
}

TEST_CASE("cli exit codes: config errors are 2") {
    TempDir tmp("cli-err");

    // Unknown preset.
    CHECK(run_cli("train-rl --preset nope", tmp.file("a.txt")) == 2);

    // Unknown config key.
    write_file(tmp.file("bad.json"), R"({"version": 1, "typo_key": 3})");
    CHECK(run_cli("train-rl --config " + tmp.file("bad.json"), tmp.file("b.txt")) == 2);

    // Missing dataset directory.
    write_file(tmp.file("nodir.json"), R"({"version": 1, "data": {"dir": "/definitely/missing"}})");
    CHECK(run_cli("train-rl --config " + tmp.file("nodir.json"), tmp.file("c.txt")) == 2);

    // Audit / plot on nonexistent run directories.
    CHECK(run_cli("audit " + tmp.file("ghost"), tmp.file("d.txt")) == 2);
    CHECK(run_cli("plot " + tmp.file("ghost"), tmp.file("e.txt")) == 2);

    // Plot on an empty CSV.
    fs::create_directories(tmp.file("empty-run"));
    write_file(tmp.file("empty-run") + "/metrics.csv", std::string(kMetricsCsvHeader) + "\n");
    CHECK(run_cli("plot " + tmp.file("empty-run"), tmp.file("f.txt")) == 2);

    // Bad CLI usage.
    CHECK(run_cli("no-such-command", tmp.file("g.txt")) == 2);
    CHECK(run_cli("probe", tmp.file("h.txt")) == 2); // neither checkpoint nor raw mode
}

TEST_CASE("svg renderer handles a single-row history") {
    MetricsRecord r;
    r.epoch = 1;
    r.pr_proper_action = 0.5;
    const std::string svg = render_pr_proper_action_svg({r});
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("epoch") != std::string::npos);
    CHECK_THROWS_AS(render_pr_proper_action_svg({}), std::invalid_argument);
}
