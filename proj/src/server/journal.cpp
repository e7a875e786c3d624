#include "coopvax/server/journal.hpp"

#include <chrono>
#include <iostream>

namespace coopvax::server {

JsonLog::JsonLog(const std::filesystem::path& path) : enabled_(true) {
  if (path.empty()) {
    to_stderr_ = true;
  } else {
    file_.open(path, std::ios::app);
    if (!file_) throw std::runtime_error("cannot open log " + path.string());
  }
}

void JsonLog::write(std::string_view event, nlohmann::ordered_json fields) {
  if (!enabled_) return;
  nlohmann::ordered_json line;
  line["ts_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  line["event"] = event;
  for (auto& [k, v] : fields.items()) line[k] = std::move(v);
  const auto text = line.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
  std::lock_guard lock(mu_);
  if (to_stderr_) {
    std::cerr << text << '\n';
  } else {
    file_ << text << '\n';
    file_.flush();
  }
}

void ResultsJournal::append(const nlohmann::ordered_json& record) {
  if (path_.empty()) return;
  const auto text = record.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app);
  out << text << '\n';
}

}  // namespace coopvax::server
