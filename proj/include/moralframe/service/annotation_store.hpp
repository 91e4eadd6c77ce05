#pragma once

// Append-only JSON-lines store of annotation revisions. Every append is
// flushed and fsynced before it becomes visible to readers.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"
#include "../situation.hpp"

namespace moralframe {

struct AnnotationRecord {
  std::string id;
  std::string sentence;
  std::vector<Fragment> fragments;
  std::string author;
  int revision = 0;
  std::string created_at;  // UTC, ISO 8601

  nlohmann::ordered_json to_json() const {
    return {{"id", id},
            {"sentence", sentence},
            {"fragments", fragments_to_json(fragments)},
            {"author", author},
            {"revision", revision},
            {"created_at", created_at}};
  }

  static AnnotationRecord from_json(const nlohmann::json& j) {
    AnnotationRecord r;
    r.id = j.at("id");
    r.sentence = j.at("sentence");
    r.fragments = fragments_from_json(j.at("fragments"));
    r.author = j.at("author");
    r.revision = j.at("revision");
    r.created_at = j.at("created_at");
    return r;
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

class AnnotationStore {
public:
  explicit AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
      const auto lines = split_lines(read_text_file(path_));
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
          AnnotationRecord r = AnnotationRecord::from_json(nlohmann::json::parse(lines[i]));
          index_[r.id].push_back(std::move(r));
        } catch (const std::exception& e) {
          throw ValidationError(path_.string() + ":" + std::to_string(i + 1) + ": bad annotation record: " + e.what());
        }
      }
    }
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open annotation store " + path_.string());
  }

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;
  ~AnnotationStore() {
    if (fd_ >= 0) ::close(fd_);
  }

  // Stores the next revision for `id`; a new id is allocated when none is given.
  AnnotationRecord append(std::optional<std::string> id, std::string sentence, std::vector<Fragment> fragments,
                          std::string author) {
    std::unique_lock lock(mutex_);
    AnnotationRecord r;
    if (id) {
      if (id->empty()) throw ValidationError("annotation id must not be empty");
      r.id = *id;
    } else {
      std::size_t k = index_.size() + 1;
      do {
        char buf[32];
        std::snprintf(buf, sizeof buf, "ann-%06zu", k++);
        r.id = buf;
      } while (index_.count(r.id));
    }
    auto it = index_.find(r.id);
    r.revision = it == index_.end() ? 1 : it->second.back().revision + 1;
    r.sentence = std::move(sentence);
    r.fragments = std::move(fragments);
    r.author = std::move(author);
    r.created_at = utc_timestamp();

    const std::string line = r.to_json().dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) throw IoError("annotation store write failed");
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw IoError("annotation store fsync failed");
    index_[r.id].push_back(r);
    return r;
  }

  // Full revision history, oldest first; empty for an unknown id.
  std::vector<AnnotationRecord> history(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = index_.find(id);
    return it == index_.end() ? std::vector<AnnotationRecord>{} : it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return index_.size();
  }

private:
  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<AnnotationRecord>> index_;
};

} // namespace moralframe
