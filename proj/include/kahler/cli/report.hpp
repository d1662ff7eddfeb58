#pragma once

// Check rows, the JSON report, and the plain-text summary table.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "kahler/inequalities.hpp"
#include "kahler/io.hpp"

namespace kahler::cli {

using nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

struct CheckRow {
    std::string pipeline;
    InequalityReport report;
};

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const InequalityReport& r) {
    json j{{"name", r.name},
           {"status", to_string(r.status)},
           {"lhs", number_or_null(r.lhs)},
           {"rhs", number_or_null(r.rhs)},
           {"margin", number_or_null(r.margin)},
           {"tolerance", number_or_null(r.tolerance)},
           {"two_sided", r.two_sided},
           {"pass", r.status == ReportStatus::Checked ? json(r.pass) : json(nullptr)}};
    if (!r.point.empty()) j["point"] = r.point;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

/// Collects check rows and artifacts; serialized without timestamps so that fixed
/// inputs give identical bytes.
class RunReport {
public:
    void add(const std::string& pipeline, InequalityReport r) { checks_.push_back({pipeline, std::move(r)}); }
    void add_artifact(const std::string& relative_path) { artifacts_.push_back(relative_path); }
    void add_info(const std::string& pipeline, const std::string& key, json value) { info_[pipeline][key] = std::move(value); }

    const std::vector<CheckRow>& checks() const { return checks_; }
    const std::vector<std::string>& artifacts() const { return artifacts_; }

    int count_failed() const {
        int c = 0;
        for (const auto& row : checks_) c += row.report.failed() ? 1 : 0;
        return c;
    }
    int count_status(ReportStatus s) const {
        int c = 0;
        for (const auto& row : checks_) c += row.report.status == s ? 1 : 0;
        return c;
    }
    bool ok() const { return count_failed() == 0; }

    json to_json(const json& config) const {
        json checks = json::array();
        for (const auto& row : checks_) {
            json j = cli::to_json(row.report);
            j["pipeline"] = row.pipeline;
            checks.push_back(std::move(j));
        }
        const int checked = count_status(ReportStatus::Checked);
        return {{"schema_version", kReportSchemaVersion},
                {"tool", "kahler"},
                {"config", config},
                {"checks", checks},
                {"info", info_.empty() ? json::object() : json(info_)},
                {"artifacts", artifacts_},
                {"summary",
                 {{"checks", checks_.size()},
                  {"checked", checked},
                  {"passed", checked - count_failed()},
                  {"failed", count_failed()},
                  {"not_applicable", count_status(ReportStatus::NotApplicable)},
                  {"ok", ok()}}}};
    }

    CsvTable summary_table() const {
        CsvTable t({"pipeline", "check", "status", "margin", "tolerance", "result", "note"});
        for (const auto& row : checks_) {
            const auto& r = row.report;
            t.row({CsvTable::cell(row.pipeline), CsvTable::cell(r.name), CsvTable::cell(to_string(r.status)),
                   std::isfinite(r.margin) ? CsvTable::cell(r.margin) : "", CsvTable::cell(r.tolerance), result_word(r),
                   CsvTable::cell(r.note)});
        }
        return t;
    }

    /// Fixed-width table for the terminal.
    void print_summary(std::ostream& os) const {
        std::size_t w = 5;
        for (const auto& row : checks_) w = std::max(w, row.pipeline.size() + 1 + row.report.name.size());
        char buf[64];
        os << pad("check", w) << "  " << pad("margin", 13) << "  " << pad("tolerance", 9) << "  result\n";
        for (const auto& row : checks_) {
            const auto& r = row.report;
            if (std::isfinite(r.margin)) std::snprintf(buf, sizeof buf, "% .6e", r.margin);
            else std::snprintf(buf, sizeof buf, "%s", "-");
            os << pad(row.pipeline + "/" + r.name, w) << "  " << pad(buf, 13) << "  ";
            std::snprintf(buf, sizeof buf, "%.1e", r.tolerance);
            os << pad(buf, 9) << "  " << result_word(r) << '\n';
        }
        os << checks_.size() << " checks: " << count_status(ReportStatus::Checked) - count_failed() << " pass, " << count_failed()
           << " fail, " << count_status(ReportStatus::NotApplicable) << " not applicable\n";
    }

private:
    static std::string result_word(const InequalityReport& r) {
        if (r.status == ReportStatus::NotApplicable) return "n/a";
        return r.pass ? "PASS" : "FAIL";
    }
    static std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

    std::vector<CheckRow> checks_;
    std::vector<std::string> artifacts_;
    std::map<std::string, json> info_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

}  // namespace kahler::cli
