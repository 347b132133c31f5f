#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fraccond/cli/config.hpp"

namespace fraccond::cli {

/// 17 significant digits, enough to round-trip any double.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Row-oriented CSV assembled in memory and written in one piece.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { add_row_text(header); }

    template <class... Cells>
    void row(const Cells&... cells) {
        std::vector<std::string> out;
        (out.push_back(cell(cells)), ...);
        if (out.size() != width_) throw std::logic_error("csv: row width mismatch");
        add_row_text(out);
    }

    const std::string& text() const { return text_; }

private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    template <class I, std::enable_if_t<std::is_integral_v<I>, int> = 0>
    static std::string cell(I v) {
        return std::to_string(v);
    }

    void add_row_text(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) text_ += ',';
            text_ += cells[k];
        }
        text_ += '\n';
    }

    std::size_t width_;
    std::string text_;
};

/// Writes to a temporary sibling then renames over the target.
inline void write_atomically(const std::filesystem::path& target, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create output directory " + target.parent_path().string() + ": " + ec.message());
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw IoError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
}

/// Collects checks and files during a command, then writes manifest.json.
class RunManifest {
public:
    RunManifest(std::string command, const RunConfig& rc, std::filesystem::path out_dir)
        : command_(std::move(command)), echo_(rc.echo), seed_(rc.seed), dir_(std::move(out_dir)),
          start_(std::chrono::steady_clock::now()) {}

    const std::filesystem::path& dir() const { return dir_; }

    void write_file(const std::string& name, const std::string& content) {
        write_atomically(dir_ / name, content);
        files_.push_back(name);
    }

    /// Records a check of the form value <= threshold.
    bool check_at_most(const std::string& name, double value, double threshold) {
        const bool pass = value <= threshold;
        checks_.push_back(Json{{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
        return pass;
    }

    bool check_flag(const std::string& name, bool pass) {
        checks_.push_back(Json{{"name", name}, {"pass", pass}});
        return pass;
    }

    void record(const std::string& name, double value) { values_[name] = value; }
    void record(const std::string& name, const std::string& value) { values_[name] = value; }
    void warn(const std::string& message) { warnings_.push_back(message); }

    bool all_passed() const {
        for (const auto& c : checks_)
            if (!c.at("pass").get<bool>()) return false;
        return true;
    }
    const Json& checks() const { return checks_; }
    const std::vector<std::string>& files() const { return files_; }

    Json finish() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        Json m;
        m["schema_version"] = kSchemaVersion;
        m["artifact"] = "fraccond";
        m["version"] = kArtifactVersion;
        m["command"] = command_;
        m["seed"] = seed_;
        m["config"] = echo_;
        m["wall_clock_seconds"] = secs;
        m["checks"] = checks_;
        m["all_passed"] = all_passed();
        m["values"] = values_;
        m["warnings"] = warnings_;
        m["files"] = files_;
        write_atomically(dir_ / "manifest.json", m.dump(2) + "\n");
        return m;
    }

private:
    std::string command_;
    Json echo_;
    std::uint64_t seed_;
    std::filesystem::path dir_;
    std::chrono::steady_clock::time_point start_;
    Json checks_ = Json::array();
    Json values_ = Json::object();
    std::vector<std::string> warnings_;
    std::vector<std::string> files_;
};

} // namespace fraccond::cli
