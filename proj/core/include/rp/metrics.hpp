#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rp {

// One per-epoch row of the training log.
//   train_error_online: fraction of erroneous actions taken during the epoch
//     (sampled actions, so this includes exploration error).
//   train_error_frozen: end-of-epoch argmax error over the training stream.
//   pr_proper_action:   1 - train_error_online.
//   mean_return:        mean undiscounted total reward of the episodes that
//     finished within the epoch (0 when none finished).
//   steps:              cumulative environment steps at the end of the epoch.
//   seconds:            cumulative wall-clock seconds (diagnostic only; the
//     one column excluded from bit-reproducibility).
struct MetricsRecord {
    std::uint64_t epoch = 0;
    double train_error_online = 0.0;
    double train_error_frozen = 0.0;
    double pr_proper_action = 0.0;
    double mean_return = 0.0;
    std::uint64_t steps = 0;
    double seconds = 0.0;
    std::optional<double> test_error;
};

inline constexpr const char* kMetricsCsvHeader =
    "epoch,train_error_online,train_error_frozen,pr_proper_action,mean_return,steps,seconds,"
    "test_error";

// Shortest round-trip decimal rendering (std::to_chars); bit-deterministic
// for a given double on every platform we target.
std::string format_double(double v);

std::string metrics_csv_row(const MetricsRecord& r);

// Parses a CSV produced by metrics_csv_row (header required).
std::vector<MetricsRecord> parse_metrics_csv(const std::string& path);

} // namespace rp
