#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "iliosim/document.hpp"

namespace iliosim::service {

/// Directory of canonical session documents, one `<id>.json` per session.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  /// Stores a new document under a fresh sequential id.
  std::string save(const SessionDocument& doc);
  /// Overwrites (or creates) the document with the given id.
  void save(const std::string& id, const SessionDocument& doc);

  /// Throws NotFound, VersionMismatch or CorruptDocument.
  SessionDocument load(const std::string& id) const;
  std::string load_text(const std::string& id) const;

  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;
  const std::filesystem::path& dir() const { return dir_; }

  static bool valid_id(const std::string& id);

 private:
  std::filesystem::path path_for(const std::string& id) const;

  std::filesystem::path dir_;
  mutable std::mutex alloc_mutex_;
  long next_ = 0;
};

/// Store directory from ILIOSIM_STORE, falling back to ./iliosim-store.
std::filesystem::path default_store_dir();

}  // namespace iliosim::service
