#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "rinx/error.hpp"
#include "rinx/session.hpp"

namespace rinx {

// Sessions keyed by opaque ids. Events on one session run one at a time in
// arrival order; snapshot readers only ever see committed states.
class SessionRegistry {
 public:
  std::string create(std::shared_ptr<const Trajectory> traj, const RinConfig& config, const MeasureSelector& measure,
                     const SessionOptions& options = {}) {
    auto entry = std::make_shared<Entry>();
    entry->state = std::make_shared<const SessionState>(create_session(std::move(traj), config, measure, options));
    std::unique_lock lock(map_mutex_);
    std::string id;
    do id = new_id();
    while (sessions_.count(id));
    sessions_.emplace(id, std::move(entry));
    return id;
  }

  bool erase(const std::string& id) {
    std::unique_lock lock(map_mutex_);
    return sessions_.erase(id) > 0;
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
  }

  std::size_t size() const {
    std::shared_lock lock(map_mutex_);
    return sessions_.size();
  }

  std::shared_ptr<const SessionState> state(const std::string& id) const { return find(id)->load(); }

  nlohmann::json snapshot(const std::string& id) const { return rinx::snapshot(*state(id)); }

  // Applies the event and returns the resulting snapshot. Throws on failure,
  // leaving the session as it was.
  nlohmann::json apply(const std::string& id, const UpdateEvent& ev) {
    auto entry = find(id);
    std::lock_guard writer(entry->writer);
    auto current = entry->load();
    EventResult r = handle_event(*current, ev);
    auto next = std::make_shared<const SessionState>(std::move(r.state));
    entry->store(next);
    return rinx::snapshot(*next);
  }

  // Wire-level entry point: one client message in, one server message out.
  nlohmann::json handle_message(const std::string& id, const std::string& text) {
    try {
      nlohmann::json msg;
      try {
        msg = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidPayload, std::string("not valid JSON: ") + e.what());
      }
      return apply(id, event_from_json(msg));
    } catch (const Error& e) {
      return error_to_json(e.code(), e.what());
    } catch (const std::exception& e) {
      return error_to_json(ErrorCode::InvalidPayload, e.what());
    }
  }

 private:
  struct Entry {
    std::mutex writer;
    mutable std::mutex slot;
    std::shared_ptr<const SessionState> state;

    std::shared_ptr<const SessionState> load() const {
      std::lock_guard lock(slot);
      return state;
    }
    void store(std::shared_ptr<const SessionState> next) {
      std::lock_guard lock(slot);
      state = std::move(next);
    }
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
    return it->second;
  }

  std::string new_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id(16, '0');
    std::lock_guard lock(rng_mutex_);
    for (char& c : id) c = kHex[rng_() & 15];
    return id;
  }

  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_{std::random_device{}()};
};

}  // namespace rinx
