#pragma once

// Live operation: one ticker advances a World against a wall clock while
// network clients subscribe to telemetry frames and submit commands. The
// ticker owns the World; clients only touch the two queues below.

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "softfish/config.hpp"
#include "softfish/errors.hpp"
#include "softfish/simulation.hpp"
#include "softfish/telemetry.hpp"

#include "httplib.h"

namespace softfish::service {

struct KeyCommand { int key; };
struct PauseCommand {};
struct ResumeCommand {};
struct ResetCommand {};
using Command = std::variant<KeyCommand, PauseCommand, ResumeCommand, ResetCommand>;

// Throws ParseError with a human-readable reason for anything malformed.
inline Command parse_command(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ParseError("malformed JSON", 0, "");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ParseError("message needs a string \"type\"", 0, "type");
  }
  const auto type = j["type"].get<std::string>();
  auto only = [&](std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) throw ParseError("unexpected field", 0, it.key());
    }
  };
  if (type == "key") {
    only({"type", "key"});
    if (!j.contains("key") || !j["key"].is_number_integer()) {
      throw ParseError("key message needs an integer \"key\"", 0, "key");
    }
    const int k = j["key"].get<int>();
    if (k < 1 || k > 5) throw ParseError("key must be 1..5", 0, "key");
    return KeyCommand{k};
  }
  only({"type"});
  if (type == "pause") return PauseCommand{};
  if (type == "resume") return ResumeCommand{};
  if (type == "reset") return ResetCommand{};
  throw ParseError("unknown message type \"" + type + "\"", 0, "type");
}

// Bounded per-client frame queue; the oldest frame is dropped when a slow
// reader falls behind.
class FrameQueue {
public:
  explicit FrameQueue(std::size_t capacity = 4096) : capacity_(capacity) {}

  void push(const std::string& frame) {
    {
      std::lock_guard lk(m_);
      if (q_.size() == capacity_) q_.pop_front();
      q_.push_back(frame);
    }
    cv_.notify_all();
  }

  std::optional<std::string> pop(std::chrono::milliseconds wait) {
    std::unique_lock lk(m_);
    cv_.wait_for(lk, wait, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return std::nullopt;
    auto f = std::move(q_.front());
    q_.pop_front();
    return f;
  }

  void close() {
    {
      std::lock_guard lk(m_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lk(m_);
    return closed_;
  }

private:
  mutable std::mutex m_;
  std::condition_variable cv_;
  std::deque<std::string> q_;
  std::size_t capacity_;
  bool closed_ = false;
};

struct SessionOptions {
  double speed = 1.0;    // simulated seconds per wall second
  int frame_ms = 50;     // simulated ms between frames
  std::uint64_t seed = 0;
};

class LiveSession {
public:
  explicit LiveSession(SimConfig cfg = {}, SessionOptions opt = {})
      : cfg_(std::move(cfg)), opt_(opt), world_(std::make_unique<World>(cfg_, opt_.seed)) {
    if (!(opt_.speed > 0.0) || !std::isfinite(opt_.speed)) {
      throw DomainError("speed must be positive");
    }
    if (opt_.frame_ms <= 0) throw DomainError("frame interval must be at least 1 ms");
  }

  // Client side. Returns an error frame for malformed input, nothing otherwise.
  std::optional<nlohmann::json> submit(const std::string& text) {
    try {
      auto cmd = parse_command(text);
      std::lock_guard lk(cmd_m_);
      commands_.push_back(cmd);
      return std::nullopt;
    } catch (const ParseError& e) {
      std::string msg = e.what();
      if (!e.field().empty()) msg += " (" + e.field() + ")";
      return error_frame(msg);
    }
  }

  std::shared_ptr<FrameQueue> subscribe() {
    auto q = std::make_shared<FrameQueue>();
    std::lock_guard lk(sub_m_);
    subs_[next_id_++] = q;
    return q;
  }

  void unsubscribe(const std::shared_ptr<FrameQueue>& q) {
    std::lock_guard lk(sub_m_);
    for (auto it = subs_.begin(); it != subs_.end(); ++it) {
      if (it->second == q) {
        subs_.erase(it);
        return;
      }
    }
  }

  void close_all() {
    std::lock_guard lk(sub_m_);
    for (auto& [id, q] : subs_) q->close();
  }

  // Ticker side. Applies queued commands, then steps until simulated time
  // catches up with `wall_s` (seconds on the caller's monotonic clock).
  void advance_to(double wall_s) {
    if (!origin_) origin_ = wall_s;
    std::deque<Command> pending;
    {
      std::lock_guard lk(cmd_m_);
      pending.swap(commands_);
    }
    for (const auto& c : pending) apply(c, wall_s);
    if (paused_ || stopped_) return;

    const double run_s = wall_s - *origin_ - paused_total_;
    const auto target = static_cast<std::int64_t>(std::floor(run_s * opt_.speed * 1000.0 + 1e-9));
    while (world_->time_ms() < target) {
      try {
        world_->step();
      } catch (const SimulationFault& e) {
        stopped_ = true;
        broadcast(error_frame(std::string(e.what()) + ": " + e.snapshot()).dump());
        return;
      }
      if (world_->time_ms() % opt_.frame_ms == 0) publish();
      if (world_->halted()) {
        stopped_ = true;
        publish();
        broadcast(error_frame("battery empty; simulation halted").dump());
        return;
      }
    }
  }

  std::int64_t sim_time_ms() const { return world_->time_ms(); }
  bool paused() const { return paused_; }
  const World& world() const { return *world_; }
  const SessionOptions& options() const { return opt_; }

private:
  void apply(const Command& c, double wall_s) {
    if (auto* k = std::get_if<KeyCommand>(&c)) {
      world_->press_key(k->key);
    } else if (std::holds_alternative<PauseCommand>(c)) {
      if (!paused_) {
        paused_ = true;
        pause_start_ = wall_s;
      }
    } else if (std::holds_alternative<ResumeCommand>(c)) {
      if (paused_) {
        paused_ = false;
        paused_total_ += wall_s - pause_start_;
      }
    } else {
      world_ = std::make_unique<World>(cfg_, opt_.seed);
      origin_ = wall_s;
      paused_total_ = 0.0;
      pause_start_ = wall_s;
      stopped_ = false;
      publish();
    }
  }

  void publish() { broadcast(telemetry_frame(world_->record()).dump()); }

  void broadcast(const std::string& frame) {
    std::lock_guard lk(sub_m_);
    for (auto& [id, q] : subs_) q->push(frame);
  }

  SimConfig cfg_;
  SessionOptions opt_;
  std::unique_ptr<World> world_;

  std::optional<double> origin_;
  double paused_total_ = 0.0;
  double pause_start_ = 0.0;
  bool paused_ = false;
  bool stopped_ = false;

  std::mutex cmd_m_;
  std::deque<Command> commands_;

  std::mutex sub_m_;
  std::map<std::uint64_t, std::shared_ptr<FrameQueue>> subs_;
  std::uint64_t next_id_ = 0;
};

// HTTP front end: GET /stream is a chunked newline-delimited JSON stream of
// frames; POST /command takes one message per request.
class Server {
public:
  explicit Server(LiveSession& session) : session_(session) {
    http_.Get("/stream", [this](const httplib::Request&, httplib::Response& res) {
      auto q = session_.subscribe();
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "application/x-ndjson",
          [this, q](std::size_t, httplib::DataSink& sink) {
            if (stopping_ || q->closed()) return false;
            if (auto f = q->pop(std::chrono::milliseconds(100))) {
              *f += '\n';
              return sink.write(f->data(), f->size());
            }
            return sink.is_writable();
          },
          [this, q](bool) { session_.unsubscribe(q); });
    });
    http_.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto err = session_.submit(req.body)) {
        res.status = 400;
        res.set_content(err->dump(), "application/json");
      } else {
        res.set_content(R"({"type":"ok"})", "application/json");
      }
    });
  }

  ~Server() { stop(); }

  // Binds, starts the ticker and the listener; returns the bound port.
  int start(const std::string& host, int port) {
    const int bound = port == 0 ? http_.bind_to_any_port(host) : (http_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    ticker_ = std::thread([this] { tick_loop(); });
    listener_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
    return bound;
  }

  bool running() const { return !stopping_ && http_.is_running(); }

  void stop() {
    if (stopping_.exchange(true)) return;
    session_.close_all();
    http_.stop();
    if (listener_.joinable()) listener_.join();
    if (ticker_.joinable()) ticker_.join();
  }

private:
  void tick_loop() {
    const auto t0 = std::chrono::steady_clock::now();
    while (!stopping_) {
      const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
      session_.advance_to(wall.count());
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  }

  LiveSession& session_;
  httplib::Server http_;
  std::thread ticker_;
  std::thread listener_;
  std::atomic<bool> stopping_{false};
};

} // namespace softfish::service
