#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "liporos/io.hpp"

namespace liporos {

/// ISO 8601 UTC timestamp. Reports embed exactly one of these; byte-identity
/// of repeated runs is checked with this field stripped.
inline std::string iso8601_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

struct InputRecord {
  std::string path;
  std::string fnv1a64;
};

/// The envelope every command emits: schema id, command, timestamp, the
/// effective config, content hashes of the inputs, and the result payload.
inline json make_report(const std::string& command, const json& config,
                        const std::vector<InputRecord>& inputs, json result) {
  json in = json::array();
  for (const auto& rec : inputs) in.push_back(json{{"path", rec.path}, {"fnv1a64", rec.fnv1a64}});
  return json{{"schema", "liporos-report/1"},
              {"command", command},
              {"timestamp", iso8601_now()},
              {"config", config},
              {"inputs", in},
              {"result", std::move(result)}};
}

inline InputRecord hash_input(const std::string& path) {
  std::string bytes = read_file(path);
  return InputRecord{path, fnv1a64_hex(std::span<const char>(bytes.data(), bytes.size()))};
}

}  // namespace liporos
