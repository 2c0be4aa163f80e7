#pragma once

#include <map>
#include <optional>
#include <string>

#include "rp/config.hpp"
#include "rp/envsim.hpp"
#include "rp/metrics.hpp"

namespace rp {

// Self-describing run record: written with status "running" before the first
// training step and finalized at exit. The embedded config snapshot is
// enough to reproduce the run bit-exactly (modulo the wall-clock column).
struct RunManifest {
    std::string run_id;
    std::string command; // train-rl | train-supervised
    std::uint64_t seed = 0;
    std::string config_json; // canonical snapshot
    std::string config_hash;
    std::string source_revision;
    std::map<std::string, std::string> dataset_digests; // filename -> sha256
    std::string started_at; // ISO-8601 UTC
    std::string finished_at;
    std::string status = "running"; // running | completed | diverged | failed
    LabelLedger ledger;

    struct Results {
        std::uint64_t epochs_completed = 0;
        bool reached_target = false;
        double final_train_error_online = 0.0;
        double final_train_error_frozen = 0.0;
        std::optional<double> final_test_error;
        std::string final_checkpoint;
    };
    std::optional<Results> results;

    void write(const std::string& path) const;
    static RunManifest read(const std::string& path);
};

std::string iso8601_utc_now();

// "<command>-seed<seed>-<hash prefix>"; deterministic for a given config.
std::string make_run_id(const std::string& command, std::uint64_t seed,
                        const std::string& config_hash);

} // namespace rp
