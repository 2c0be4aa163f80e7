#include "rp/manifest.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rp/errors.hpp"

namespace rp {

using nlohmann::json;

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string make_run_id(const std::string& command, std::uint64_t seed,
                        const std::string& config_hash) {
    return command + "-seed" + std::to_string(seed) + "-" + config_hash.substr(0, 8);
}

void RunManifest::write(const std::string& path) const {
    json j;
    j["run_id"] = run_id;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = json::parse(config_json);
    j["config_hash"] = config_hash;
    j["source_revision"] = source_revision;
    j["dataset_digests"] = dataset_digests;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["status"] = status;
    j["ledger"] = {{"env_label_reads", ledger.env_label_reads},
                   {"agent_label_reads", ledger.agent_label_reads}};
    if (results) {
        json r;
        r["epochs_completed"] = results->epochs_completed;
        r["reached_target"] = results->reached_target;
        r["final_train_error_online"] = results->final_train_error_online;
        r["final_train_error_frozen"] = results->final_train_error_frozen;
        if (results->final_test_error) r["final_test_error"] = *results->final_test_error;
        r["final_checkpoint"] = results->final_checkpoint;
        j["results"] = r;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write on manifest '" + path + "'");
}

RunManifest RunManifest::read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("manifest parse error in '" + path + "': " + e.what());
    }
    RunManifest m;
    try {
        m.run_id = j.at("run_id").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.config_json = j.at("config").dump(2);
        m.config_hash = j.at("config_hash").get<std::string>();
        m.source_revision = j.value("source_revision", "unknown");
        if (j.contains("dataset_digests")) {
            m.dataset_digests =
                j["dataset_digests"].get<std::map<std::string, std::string>>();
        }
        m.started_at = j.value("started_at", "");
        m.finished_at = j.value("finished_at", "");
        m.status = j.value("status", "unknown");
        if (j.contains("ledger")) {
            m.ledger.env_label_reads = j["ledger"].value("env_label_reads", std::uint64_t(0));
            m.ledger.agent_label_reads = j["ledger"].value("agent_label_reads", std::uint64_t(0));
        }
        if (j.contains("results")) {
            const json& r = j["results"];
            Results res;
            res.epochs_completed = r.value("epochs_completed", std::uint64_t(0));
            res.reached_target = r.value("reached_target", false);
            res.final_train_error_online = r.value("final_train_error_online", 0.0);
            res.final_train_error_frozen = r.value("final_train_error_frozen", 0.0);
            if (r.contains("final_test_error")) {
                res.final_test_error = r["final_test_error"].get<double>();
            }
            res.final_checkpoint = r.value("final_checkpoint", "");
            m.results = res;
        }
    } catch (const json::exception& e) {
        throw IoError("manifest field error in '" + path + "': " + e.what());
    }
    return m;
}

} // namespace rp
