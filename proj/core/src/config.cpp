#include "rp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rp/errors.hpp"
#include "rp/sha256.hpp"

namespace rp {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& scope,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("unknown config key '" + scope + key + "'");
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& scope) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + scope + key + "': " + e.what());
    }
}

TaskMode parse_task(const std::string& s) {
    if (s == "digits") return TaskMode::Digits;
    if (s == "parity") return TaskMode::Parity;
    throw ConfigError("task must be 'digits' or 'parity', got '" + s + "'");
}

StopMetric parse_stop_metric(const std::string& s) {
    if (s == "online") return StopMetric::Online;
    if (s == "frozen") return StopMetric::Frozen;
    throw ConfigError("stop_metric must be 'online' or 'frozen', got '" + s + "'");
}

} // namespace

void RunConfig::validate() const {
    if (version != 1) throw ConfigError("unsupported config version " + std::to_string(version));
    train.validate();
    if (!(probe.eta > 0.0)) throw ConfigError("probe.eta must be > 0");
    if (probe.max_epochs == 0) throw ConfigError("probe.max_epochs must be > 0");
    if (probe.plateau_window < 0) throw ConfigError("probe.plateau_window must be >= 0");
}

std::string RunConfig::to_json_text() const {
    json j;
    j["version"] = version;
    j["task"] = task == TaskMode::Parity ? "parity" : "digits";
    j["seed"] = seed;
    j["data"] = {{"dir", data.dir},
                 {"train_images", data.train_images},
                 {"train_labels", data.train_labels},
                 {"test_images", data.test_images},
                 {"test_labels", data.test_labels},
                 {"train_subset", data.train_subset},
                 {"test_subset", data.test_subset}};
    j["train"] = {{"eta_pi", train.eta_pi},
                  {"eta_v", train.eta_v},
                  {"gamma", train.gamma},
                  {"target_train_error", train.target_train_error},
                  {"stop_metric", train.stop_metric == StopMetric::Frozen ? "frozen" : "online"},
                  {"max_epochs", train.max_epochs},
                  {"test_eval_period", train.test_eval_period}};
    j["rewards"] = {{"correct", train.schedule.r_correct},
                    {"terminal", train.schedule.r_terminal},
                    {"error", train.schedule.r_error},
                    {"n_consecutive", train.schedule.n_consecutive},
                    {"error_terminates", train.schedule.error_terminates},
                    {"terminal_stacks", train.schedule.terminal_stacks}};
    j["net"] = {{"input_dim", train.net.input_dim},
                {"trunk_dim", train.net.trunk_dim},
                {"leaky_slope", train.net.leaky_slope},
                {"linear_value_output", train.net.linear_value_output}};
    j["probe"] = {{"eta", probe.eta},
                  {"max_epochs", probe.max_epochs},
                  {"plateau_window", probe.plateau_window},
                  {"plateau_rel_improvement", probe.plateau_rel_improvement}};
    j["checkpoint_period"] = checkpoint_period;
    return j.dump(2);
}

std::string RunConfig::config_hash() const { return sha256_hex(to_json_text()); }

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    require_keys(j, "", {"version", "task", "seed", "data", "train", "rewards", "net", "probe",
                         "checkpoint_period"});

    RunConfig c;
    read_field(j, "version", c.version, "");
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    read_field(j, "seed", c.seed, "");
    read_field(j, "checkpoint_period", c.checkpoint_period, "");

    if (j.contains("data")) {
        const json& d = j["data"];
        require_keys(d, "data.", {"dir", "train_images", "train_labels", "test_images",
                                  "test_labels", "train_subset", "test_subset"});
        read_field(d, "dir", c.data.dir, "data.");
        read_field(d, "train_images", c.data.train_images, "data.");
        read_field(d, "train_labels", c.data.train_labels, "data.");
        read_field(d, "test_images", c.data.test_images, "data.");
        read_field(d, "test_labels", c.data.test_labels, "data.");
        read_field(d, "train_subset", c.data.train_subset, "data.");
        read_field(d, "test_subset", c.data.test_subset, "data.");
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        require_keys(t, "train.", {"eta_pi", "eta_v", "gamma", "target_train_error", "stop_metric",
                                   "max_epochs", "test_eval_period"});
        read_field(t, "eta_pi", c.train.eta_pi, "train.");
        read_field(t, "eta_v", c.train.eta_v, "train.");
        read_field(t, "gamma", c.train.gamma, "train.");
        read_field(t, "target_train_error", c.train.target_train_error, "train.");
        if (t.contains("stop_metric")) {
            c.train.stop_metric = parse_stop_metric(t.at("stop_metric").get<std::string>());
        }
        read_field(t, "max_epochs", c.train.max_epochs, "train.");
        read_field(t, "test_eval_period", c.train.test_eval_period, "train.");
    }
    if (j.contains("rewards")) {
        const json& r = j["rewards"];
        require_keys(r, "rewards.", {"correct", "terminal", "error", "n_consecutive",
                                     "error_terminates", "terminal_stacks"});
        read_field(r, "correct", c.train.schedule.r_correct, "rewards.");
        read_field(r, "terminal", c.train.schedule.r_terminal, "rewards.");
        read_field(r, "error", c.train.schedule.r_error, "rewards.");
        read_field(r, "n_consecutive", c.train.schedule.n_consecutive, "rewards.");
        read_field(r, "error_terminates", c.train.schedule.error_terminates, "rewards.");
        read_field(r, "terminal_stacks", c.train.schedule.terminal_stacks, "rewards.");
    }
    if (j.contains("net")) {
        const json& n = j["net"];
        require_keys(n, "net.", {"input_dim", "trunk_dim", "leaky_slope", "linear_value_output"});
        read_field(n, "input_dim", c.train.net.input_dim, "net.");
        read_field(n, "trunk_dim", c.train.net.trunk_dim, "net.");
        read_field(n, "leaky_slope", c.train.net.leaky_slope, "net.");
        read_field(n, "linear_value_output", c.train.net.linear_value_output, "net.");
    }
    if (j.contains("probe")) {
        const json& p = j["probe"];
        require_keys(p, "probe.", {"eta", "max_epochs", "plateau_window",
                                   "plateau_rel_improvement"});
        read_field(p, "eta", c.probe.eta, "probe.");
        read_field(p, "max_epochs", c.probe.max_epochs, "probe.");
        read_field(p, "plateau_window", c.probe.plateau_window, "probe.");
        read_field(p, "plateau_rel_improvement", c.probe.plateau_rel_improvement, "probe.");
    }

    c.train.seed = c.seed;
    c.train.task = c.task;
    c.probe.seed = c.seed;
    c.validate();
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

RunConfig RunConfig::preset(const std::string& name) {
    RunConfig c;
    c.train.seed = c.seed;
    c.train.task = c.task;
    c.probe.seed = c.seed;
    if (name == "paper-full") {
        // Full 60k stream, the reported experiment scale.
        c.train.target_train_error = 0.004;
        c.train.stop_metric = StopMetric::Online;
        c.train.max_epochs = 1200;
        c.checkpoint_period = 100;
    } else if (name == "subset-10k") {
        // Desk-scale run on the first 10k training samples.
        c.data.train_subset = 10000;
        c.train.target_train_error = 0.02;
        c.train.stop_metric = StopMetric::Frozen;
        c.train.max_epochs = 400;
        c.checkpoint_period = 100;
    } else if (name == "parity") {
        c.task = TaskMode::Parity;
        c.train.task = TaskMode::Parity;
        c.data.train_subset = 10000;
        c.train.target_train_error = 0.01;
        c.train.stop_metric = StopMetric::Online;
        c.train.max_epochs = 400;
        c.checkpoint_period = 100;
    } else if (name == "ci-smoke") {
        c.data.train_subset = 512;
        c.data.test_subset = 500;
        c.train.max_epochs = 3;
        c.train.target_train_error = 0.0;
        c.probe.max_epochs = 20;
    } else {
        throw ConfigError("unknown preset '" + name + "' (have: paper-full, subset-10k, parity, "
                          "ci-smoke)");
    }
    c.validate();
    return c;
}

std::vector<std::string> RunConfig::preset_names() {
    return {"paper-full", "subset-10k", "parity", "ci-smoke"};
}

std::string RunConfig::resolved_data_dir() const {
    if (!data.dir.empty()) return data.dir;
    if (const char* env = std::getenv("REWARD_PROBE_DATA_DIR"); env && *env) return env;
    throw ConfigError("no dataset directory: set data.dir in the config or export "
                      "REWARD_PROBE_DATA_DIR");
}

} // namespace rp
