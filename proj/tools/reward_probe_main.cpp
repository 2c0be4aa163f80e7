#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rp/checkpoint.hpp"
#include "rp/config.hpp"
#include "rp/dataset.hpp"
#include "rp/envsim.hpp"
#include "rp/errors.hpp"
#include "rp/manifest.hpp"
#include "rp/metrics.hpp"
#include "rp/probe.hpp"
#include "rp/sha256.hpp"
#include "rp/svg_plot.hpp"
#include "rp/trainer.hpp"

#ifndef REWARDPROBE_SOURCE_REV
#define REWARDPROBE_SOURCE_REV "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Run config JSON file");
    cmd->add_option("--preset", opts.preset,
                    "Built-in preset: paper-full, subset-10k, parity, ci-smoke");
    cmd->add_option("--seed", opts.seed, "Override the config seed");
    cmd->add_option("--out", opts.out, "Output directory (default runs/<run-id>)");
}

rp::RunConfig resolve_config(const CommonOpts& opts) {
    if (!opts.config_path.empty() && !opts.preset.empty()) {
        throw rp::ConfigError("--config and --preset are mutually exclusive");
    }
    rp::RunConfig cfg;
    if (!opts.preset.empty()) {
        cfg = rp::RunConfig::preset(opts.preset);
    } else if (!opts.config_path.empty()) {
        cfg = rp::RunConfig::from_json_file(opts.config_path);
    } else {
        cfg = rp::RunConfig::preset("paper-full");
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.train.seed = *opts.seed;
        cfg.probe.seed = *opts.seed;
    }
    cfg.validate();
    return cfg;
}

std::string require_data_file(const std::string& dir, const std::string& name) {
    const fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) {
        // Also accept a gzip-compressed variant.
        const fs::path gz = fs::path(dir) / (name + ".gz");
        if (fs::exists(gz)) return gz.string();
        throw rp::ConfigError("dataset file missing: " + p.string());
    }
    return p.string();
}

struct LoadedData {
    rp::LabeledSet train;
    rp::LabeledSet test;
    std::map<std::string, std::string> digests;
};

LoadedData load_data(const rp::RunConfig& cfg) {
    const std::string dir = cfg.resolved_data_dir();
    const std::string train_images = require_data_file(dir, cfg.data.train_images);
    const std::string train_labels = require_data_file(dir, cfg.data.train_labels);
    const std::string test_images = require_data_file(dir, cfg.data.test_images);
    const std::string test_labels = require_data_file(dir, cfg.data.test_labels);

    LoadedData d;
    d.train = rp::load_labeled_set(train_images, train_labels).head(cfg.data.train_subset);
    d.test = rp::load_labeled_set(test_images, test_labels).head(cfg.data.test_subset);
    for (const auto& f : {train_images, train_labels, test_images, test_labels}) {
        d.digests[fs::path(f).filename().string()] = rp::sha256_file_hex(f);
    }
    return d;
}

void write_checkpoint_sidecar(const std::string& ckpt_path, const rp::RunManifest& manifest,
                              const rp::MetricsRecord& rec, rp::TaskMode task) {
    json j;
    j["run_id"] = manifest.run_id;
    j["config_hash"] = manifest.config_hash;
    j["task"] = task == rp::TaskMode::Parity ? "parity" : "digits";
    j["epoch"] = rec.epoch;
    j["train_error_online"] = rec.train_error_online;
    j["train_error_frozen"] = rec.train_error_frozen;
    if (rec.test_error) j["test_error"] = *rec.test_error;
    std::ofstream out(ckpt_path + ".json", std::ios::trunc);
    out << j.dump(2) << "\n";
}

int cmd_train(const std::string& command, const CommonOpts& opts) {
    const rp::RunConfig cfg = resolve_config(opts);
    const LoadedData data = load_data(cfg);

    rp::RunManifest manifest;
    manifest.command = command;
    manifest.seed = cfg.seed;
    manifest.config_json = cfg.to_json_text();
    manifest.config_hash = cfg.config_hash();
    manifest.run_id = rp::make_run_id(command, cfg.seed, manifest.config_hash);
    manifest.source_revision = REWARDPROBE_SOURCE_REV;
    manifest.dataset_digests = data.digests;
    manifest.started_at = rp::iso8601_utc_now();

    const fs::path run_dir = opts.out.empty() ? fs::path("runs") / manifest.run_id
                                              : fs::path(opts.out);
    fs::create_directories(run_dir);
    const std::string manifest_path = (run_dir / "manifest.json").string();
    manifest.write(manifest_path);

    std::ofstream csv(run_dir / "metrics.csv", std::ios::trunc);
    if (!csv) throw rp::IoError("cannot write metrics.csv under " + run_dir.string());
    csv << rp::kMetricsCsvHeader << "\n";
    csv.flush();

    std::printf("run %s -> %s\n", manifest.run_id.c_str(), run_dir.string().c_str());
    std::printf("train %zu samples, test %zu samples, task %s\n", data.train.count(),
                data.test.count(), cfg.task == rp::TaskMode::Parity ? "parity" : "digits");

    auto observer = [&](const rp::MetricsRecord& rec, const rp::ActorCriticNet& net) {
        csv << rp::metrics_csv_row(rec) << "\n";
        csv.flush();
        std::printf("epoch %llu: online %.4f frozen %.4f Pr{proper} %.4f steps %llu (%.1fs)\n",
                    (unsigned long long)rec.epoch, rec.train_error_online, rec.train_error_frozen,
                    rec.pr_proper_action, (unsigned long long)rec.steps, rec.seconds);
        std::fflush(stdout);
        if (cfg.checkpoint_period > 0 && rec.epoch % cfg.checkpoint_period == 0) {
            const std::string path =
                (run_dir / ("checkpoint_epoch_" + std::to_string(rec.epoch) + ".rpnet")).string();
            rp::save_checkpoint(path, net);
            write_checkpoint_sidecar(path, manifest, rec, cfg.task);
        }
    };

    rp::TrainResult result;
    try {
        if (command == "train-rl") {
            rp::ClassifyEnv env(data.train, cfg.train.schedule, cfg.task, rp::Rng(cfg.seed));
            result = rp::train_rl(cfg.train, env, data.train,
                                  data.test.count() ? &data.test : nullptr, observer);
        } else {
            result = rp::train_supervised(cfg.train, data.train,
                                          data.test.count() ? &data.test : nullptr, observer);
        }
    } catch (const rp::DivergenceError&) {
        manifest.status = "diverged";
        manifest.finished_at = rp::iso8601_utc_now();
        manifest.write(manifest_path);
        throw;
    }

    const std::string final_ckpt = (run_dir / "checkpoint_final.rpnet").string();
    rp::save_checkpoint(final_ckpt, result.net);
    write_checkpoint_sidecar(final_ckpt, manifest, result.history.back(), cfg.task);

    manifest.status = "completed";
    manifest.finished_at = rp::iso8601_utc_now();
    manifest.ledger = result.ledger;
    rp::RunManifest::Results res;
    res.epochs_completed = result.epochs_completed;
    res.reached_target = result.reached_target;
    res.final_train_error_online = result.history.back().train_error_online;
    res.final_train_error_frozen = result.history.back().train_error_frozen;
    res.final_test_error = result.final_test_error;
    res.final_checkpoint = "checkpoint_final.rpnet";
    manifest.results = res;
    manifest.write(manifest_path);

    std::printf("%s after %llu epochs (target %s)\n",
                result.reached_target ? "reached target" : "stopped at epoch cap",
                (unsigned long long)result.epochs_completed,
                rp::format_double(cfg.train.target_train_error).c_str());
    if (result.final_test_error) {
        std::printf("final test error: %.4f\n", *result.final_test_error);
    }
    std::printf("ledger: env label reads %llu, agent label reads %llu\n",
                (unsigned long long)result.ledger.env_label_reads,
                (unsigned long long)result.ledger.agent_label_reads);
    return kExitOk;
}

int cmd_probe(const std::string& checkpoint_path, bool raw_pixels, const CommonOpts& opts) {
    const rp::RunConfig cfg = resolve_config(opts);
    const LoadedData data = load_data(cfg);

    rp::FeatureSet train_features, test_features;
    std::string source_task;
    if (raw_pixels) {
        train_features = rp::raw_pixel_features(data.train);
        test_features = rp::raw_pixel_features(data.test);
        source_task = "raw-pixels";
    } else {
        const rp::ActorCriticNet net = rp::load_checkpoint(checkpoint_path);
        if (net.cfg.input_dim != data.train.images.at(0).size()) {
            throw rp::ConfigError("checkpoint expects input dim " +
                                  std::to_string(net.cfg.input_dim) + ", dataset images have " +
                                  std::to_string(data.train.images.at(0).size()));
        }
        train_features = rp::extract_features(net, data.train, checkpoint_path);
        test_features = rp::extract_features(net, data.test, checkpoint_path);
        source_task = net.num_actions == 2 ? "parity" : "digits";
    }

    const rp::ProbeFitResult fit = rp::fit_probe(train_features, cfg.probe);
    const double train_acc = rp::probe_accuracy(fit.probe, train_features);
    const double test_acc = rp::probe_accuracy(fit.probe, test_features);

    json report;
    report["checkpoint"] = raw_pixels ? "raw-pixels" : checkpoint_path;
    report["source_task"] = source_task;
    report["feature_dim"] = train_features.dim();
    report["probe_train_accuracy"] = train_acc;
    report["probe_test_accuracy"] = test_acc;
    report["probe_epochs"] = fit.epochs;
    report["config_hash"] = cfg.config_hash();

    fs::path out_path;
    if (!opts.out.empty()) {
        fs::create_directories(opts.out);
        out_path = fs::path(opts.out) / "probe_report.json";
    } else if (!raw_pixels) {
        out_path = fs::path(checkpoint_path).parent_path() / "probe_report.json";
    } else {
        out_path = "probe_report.json";
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw rp::IoError("cannot write probe report '" + out_path.string() + "'");
    out << report.dump(2) << "\n";

    std::printf("probe on %s features (dim %zu): train accuracy %.4f, test accuracy %.4f "
                "(%llu epochs)\n",
                source_task.c_str(), train_features.dim(), train_acc, test_acc,
                (unsigned long long)fit.epochs);
    std::printf("report: %s\n", out_path.string().c_str());
    return kExitOk;
}

int cmd_audit(const std::string& run_dir) {
    const fs::path manifest_path = fs::path(run_dir) / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw rp::ConfigError("no manifest.json under '" + run_dir + "'");
    }
    const rp::RunManifest m = rp::RunManifest::read(manifest_path.string());
    std::printf("run %s (%s): status %s\n", m.run_id.c_str(), m.command.c_str(),
                m.status.c_str());
    std::printf("environment label reads: %llu\n", (unsigned long long)m.ledger.env_label_reads);
    std::printf("agent-side labels consumed: %llu\n",
                (unsigned long long)m.ledger.agent_label_reads);
    if (m.command == "train-rl") {
        std::printf("verdict: %s\n", m.ledger.agent_label_reads == 0
                                         ? "agent learned without label access"
                                         : "LEAK: agent consumed labels");
    } else {
        std::printf("verdict: supervised run, labels consumed by design\n");
    }
    return kExitOk;
}

int cmd_plot(const std::string& run_dir, const std::string& out_file) {
    const fs::path csv_path = fs::path(run_dir) / "metrics.csv";
    if (!fs::exists(csv_path)) {
        throw rp::ConfigError("no metrics.csv under '" + run_dir + "'");
    }
    const auto records = rp::parse_metrics_csv(csv_path.string());
    if (records.empty()) {
        throw rp::ConfigError("metrics.csv has no rows in '" + run_dir + "'");
    }
    const fs::path manifest_path = fs::path(run_dir) / "manifest.json";
    std::string title;
    if (fs::exists(manifest_path)) {
        title = rp::RunManifest::read(manifest_path.string()).run_id;
    }
    const std::string svg = rp::render_pr_proper_action_svg(records, title);
    const fs::path out_path =
        out_file.empty() ? fs::path(run_dir) / "pr_proper_action.svg" : fs::path(out_file);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw rp::IoError("cannot write '" + out_path.string() + "'");
    out.write(svg.data(), std::streamsize(svg.size()));
    std::printf("wrote %s (%zu epochs)\n", out_path.string().c_str(), records.size());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MNIST classification learned through environment rewards: actor-critic "
                 "training, a supervised twin, linear probes over frozen representations, and "
                 "a label-access audit trail"};
    app.require_subcommand(1);

    CommonOpts train_rl_opts, train_sup_opts, probe_opts;
    CLI::App* train_rl_cmd =
        app.add_subcommand("train-rl", "Train the actor-critic classifier on rewards");
    add_common_options(train_rl_cmd, train_rl_opts);

    CLI::App* train_sup_cmd =
        app.add_subcommand("train-supervised", "Train the same-capacity supervised baseline");
    add_common_options(train_sup_cmd, train_sup_opts);

    std::string probe_checkpoint;
    bool probe_raw = false;
    CLI::App* probe_cmd =
        app.add_subcommand("probe", "Fit a linear probe on frozen representations");
    probe_cmd->add_option("--checkpoint", probe_checkpoint, "Checkpoint file to probe");
    probe_cmd->add_flag("--raw-pixels", probe_raw, "Probe raw pixels (reference floor)");
    add_common_options(probe_cmd, probe_opts);

    std::string audit_dir;
    CLI::App* audit_cmd = app.add_subcommand("audit", "Print the label-access ledger of a run");
    audit_cmd->add_option("run_dir", audit_dir, "Run directory")->required();

    std::string plot_dir, plot_out;
    CLI::App* plot_cmd = app.add_subcommand("plot", "Render Pr{Proper Action} vs epoch as SVG");
    plot_cmd->add_option("run_dir", plot_dir, "Run directory")->required();
    plot_cmd->add_option("--out", plot_out, "Output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (train_rl_cmd->parsed()) return cmd_train("train-rl", train_rl_opts);
        if (train_sup_cmd->parsed()) return cmd_train("train-supervised", train_sup_opts);
        if (probe_cmd->parsed()) {
            if (!probe_raw && probe_checkpoint.empty()) {
                throw rp::ConfigError("probe needs --checkpoint or --raw-pixels");
            }
            return cmd_probe(probe_checkpoint, probe_raw, probe_opts);
        }
        if (audit_cmd->parsed()) return cmd_audit(audit_dir);
        if (plot_cmd->parsed()) return cmd_plot(plot_dir, plot_out);
    } catch (const rp::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const rp::DivergenceError& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return kExitDivergence;
    } catch (const rp::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
