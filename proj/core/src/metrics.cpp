#include "rp/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rp/errors.hpp"

namespace rp {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string metrics_csv_row(const MetricsRecord& r) {
    std::string row;
    row += std::to_string(r.epoch);
    row += ',';
    row += format_double(r.train_error_online);
    row += ',';
    row += format_double(r.train_error_frozen);
    row += ',';
    row += format_double(r.pr_proper_action);
    row += ',';
    row += format_double(r.mean_return);
    row += ',';
    row += std::to_string(r.steps);
    row += ',';
    row += format_double(r.seconds);
    row += ',';
    if (r.test_error) row += format_double(*r.test_error);
    return row;
}

namespace {

double parse_double_field(const std::string& s, const std::string& path) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("bad numeric field '" + s + "' in metrics CSV '" + path + "'");
    }
    return v;
}

std::uint64_t parse_u64_field(const std::string& s, const std::string& path) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("bad integer field '" + s + "' in metrics CSV '" + path + "'");
    }
    return v;
}

} // namespace

std::vector<MetricsRecord> parse_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metrics CSV '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kMetricsCsvHeader) {
        throw IoError("bad metrics CSV header in '" + path + "'");
    }
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() != 8) {
            throw IoError("expected 8 fields per row in metrics CSV '" + path + "'");
        }
        MetricsRecord r;
        r.epoch = parse_u64_field(fields[0], path);
        r.train_error_online = parse_double_field(fields[1], path);
        r.train_error_frozen = parse_double_field(fields[2], path);
        r.pr_proper_action = parse_double_field(fields[3], path);
        r.mean_return = parse_double_field(fields[4], path);
        r.steps = parse_u64_field(fields[5], path);
        r.seconds = parse_double_field(fields[6], path);
        if (!fields[7].empty()) r.test_error = parse_double_field(fields[7], path);
        out.push_back(r);
    }
    return out;
}

} // namespace rp
