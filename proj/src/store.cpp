#include "iliosim/store.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "iliosim/error.hpp"

namespace iliosim::service {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPrefix = "session-";

void write_atomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  for (const auto& id : ids()) {
    if (id.rfind(kPrefix, 0) != 0) continue;
    const std::string digits = id.substr(kPrefix.size());
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      next_ = std::max(next_, std::stol(digits));
    }
  }
}

bool SessionStore::valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

fs::path SessionStore::path_for(const std::string& id) const { return dir_ / (id + ".json"); }

std::string SessionStore::save(const SessionDocument& doc) {
  std::string id;
  {
    std::lock_guard lock(alloc_mutex_);
    do {
      id = fmt::format("{}{:06d}", kPrefix, ++next_);
    } while (fs::exists(path_for(id)));
    save(id, doc);
  }
  return id;
}

void SessionStore::save(const std::string& id, const SessionDocument& doc) {
  if (!valid_id(id)) throw Error(ErrorCode::ValidationError, "invalid session id '" + id + "'");
  write_atomically(path_for(id), to_canonical(doc));
}

std::string SessionStore::load_text(const std::string& id) const {
  if (!valid_id(id) || !fs::exists(path_for(id))) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  std::ifstream in(path_for(id), std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SessionDocument SessionStore::load(const std::string& id) const { return from_text(load_text(id)); }

bool SessionStore::contains(const std::string& id) const { return valid_id(id) && fs::exists(path_for(id)); }

std::vector<std::string> SessionStore::ids() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path default_store_dir() {
  if (const char* env = std::getenv("ILIOSIM_STORE"); env != nullptr && *env != '\0') return env;
  return "iliosim-store";
}

}  // namespace iliosim::service
