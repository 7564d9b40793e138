#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "gpdrift/experiments/report.hpp"

#ifndef GPDRIFT_GIT_REVISION
#define GPDRIFT_GIT_REVISION "unknown"
#endif

namespace gpdrift::exp {

/// Environment variable naming the directory that relative output paths resolve against.
inline constexpr const char* kOutputDirEnv = "GPDRIFT_OUTPUT_DIR";

inline std::filesystem::path resolve_output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') p = std::filesystem::path(dir) / p;
  }
  return p;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta.json");
}

struct RunMetadata {
  std::string config_path;
  std::size_t workers = 1;
  std::string started_at;
  double wall_seconds = 0.0;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json sidecar_json(const Report& report, const RunMetadata& meta) {
  const auto& c = report.config();
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = to_string(c.experiment);
  j["model"] = kernels::describe(c.model);
  j["drift"] = sim::describe(c.drift);
  j["config_path"] = meta.config_path;
  j["master_seed"] = c.master_seed;
  j["replications"] = c.replications;
  j["workers"] = meta.workers;
  j["git_revision"] = GPDRIFT_GIT_REVISION;
  j["started_at"] = meta.started_at;
  j["wall_seconds"] = meta.wall_seconds;
  j["rows"] = report.rows().size();
  j["failed_rows"] = report.failed();
  j["exit_code"] = static_cast<int>(report.exit_code());
  j["columns"] = csv_columns();
  return j;
}

/// Writes the CSV and its `<csv>.meta.json` sidecar, creating parent directories.
inline void write_outputs(const Report& report, const std::filesystem::path& csv, const RunMetadata& meta) {
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  {
    std::ofstream out(csv);
    if (!out) throw ConfigError("cannot open output file " + csv.string());
    write_csv(out, report);
  }
  std::ofstream side(sidecar_path(csv));
  if (!side) throw ConfigError("cannot open sidecar file " + sidecar_path(csv).string());
  side << sidecar_json(report, meta).dump(2) << '\n';
}

}  // namespace gpdrift::exp
