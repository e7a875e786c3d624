#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

namespace coopvax::server {

// One JSON object per line: {"ts_ms":..., "event":..., ...fields}.
class JsonLog {
 public:
  JsonLog() = default;  // discards everything
  explicit JsonLog(const std::filesystem::path& path);  // empty path: stderr

  void write(std::string_view event, nlohmann::ordered_json fields = nlohmann::ordered_json::object());

 private:
  std::mutex mu_;
  std::ofstream file_;
  bool to_stderr_ = false;
  bool enabled_ = false;
};

// Append-only results.jsonl.
class ResultsJournal {
 public:
  ResultsJournal() = default;
  explicit ResultsJournal(std::filesystem::path path) : path_(std::move(path)) {}

  void append(const nlohmann::ordered_json& record);

 private:
  std::mutex mu_;
  std::filesystem::path path_;
};

}  // namespace coopvax::server
