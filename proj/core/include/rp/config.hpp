#pragma once

#include <string>
#include <vector>

#include "rp/probe.hpp"
#include "rp/trainer.hpp"

namespace rp {

// Everything a run needs, loadable from versioned JSON. Unknown keys are
// errors; presets provide complete baseline documents.
struct DataConfig {
    std::string dir; // empty: fall back to $REWARD_PROBE_DATA_DIR
    std::string train_images = "train-images-idx3-ubyte";
    std::string train_labels = "train-labels-idx1-ubyte";
    std::string test_images = "t10k-images-idx3-ubyte";
    std::string test_labels = "t10k-labels-idx1-ubyte";
    std::uint64_t train_subset = 0; // 0 = full set
    std::uint64_t test_subset = 0;
};

struct RunConfig {
    int version = 1;
    TaskMode task = TaskMode::Digits;
    std::uint64_t seed = 1;
    DataConfig data;
    TrainConfig train; // seed/task/net/schedule mirrored in from fields below on load
    ProbeConfig probe;
    std::uint64_t checkpoint_period = 0; // epochs between periodic checkpoints; 0 = none

    void validate() const;

    // Canonical JSON (sorted keys); hashing this pins the run identity.
    std::string to_json_text() const;
    std::string config_hash() const;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::string& path);

    // Built-in presets: paper-full, subset-10k, parity, ci-smoke.
    static RunConfig preset(const std::string& name);
    static std::vector<std::string> preset_names();

    // data.dir if set, else $REWARD_PROBE_DATA_DIR; throws ConfigError when
    // neither resolves.
    std::string resolved_data_dir() const;
};

} // namespace rp
