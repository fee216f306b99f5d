#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>

namespace noiseval {

// One chat-completion request with fixed decoding settings.
struct RequestSpec {
  std::string model;
  double temperature = 0.02;
  std::string prompt;
  int max_output = 1024;
  std::string tag;  // experiment label, not part of the cache key

  void validate() const;  // throws ValidationError
};

// Content address of a request: SHA-256 over (model, temperature, prompt).
// Stable across processes and platforms.
std::string request_key(const RequestSpec& spec);

std::string sha256_hex(std::string_view data);

// Injectable time source so rate-limit and backoff behavior is testable
// against a simulated clock.
struct Clock {
  std::function<std::uint64_t()> now_ms;
  std::function<void(std::uint64_t)> sleep_ms;

  static Clock system();
  // Shared virtual time; sleep advances it.
  static Clock simulated(std::shared_ptr<std::atomic<std::uint64_t>> time);
};

// Enforces a requests-per-minute ceiling by spacing dispatches at least
// 60000/rpm ms apart (no burst allowance, so any 60 s window holds at most
// `rpm` dispatches). Thread-safe.
class RateLimiter {
 public:
  RateLimiter(double requests_per_minute, Clock clock);

  // Blocks (via the clock) until a slot frees; returns the dispatch time.
  std::uint64_t acquire();

 private:
  std::uint64_t interval_ms_;
  Clock clock_;
  std::mutex mutex_;
  std::uint64_t next_slot_ms_ = 0;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string name() const = 0;
  // Throws AuthError (non-retryable) or TransientBackendError (retryable).
  virtual std::string complete(const RequestSpec& spec) = 0;
};

// Deterministic offline backend. Responses come from a fixture map keyed
// by exact prompt; misses either fail (strict) or synthesize a stable
// response derived from the request key. Never touches the network.
class MockBackend : public CompletionBackend {
 public:
  explicit MockBackend(std::map<std::string, std::string> fixtures = {},
                       bool strict = false);

  static MockBackend from_fixture_file(const std::filesystem::path& path,
                                       bool strict = false);

  std::string name() const override { return "mock"; }
  std::string complete(const RequestSpec& spec) override;

 private:
  std::map<std::string, std::string> fixtures_;
  bool strict_;
};

// Chat-completion HTTP backend (standard messages wire schema).
class HttpBackend : public CompletionBackend {
 public:
  HttpBackend(std::string base_url, std::string path, std::string api_key);

  std::string name() const override { return "live"; }
  std::string complete(const RequestSpec& spec) override;

  // Total HttpBackend constructions in this process; lets tests assert the
  // mock path never instantiated a network client.
  static std::uint64_t instances_created();

 private:
  std::string base_url_;
  std::string path_;
  std::string api_key_;
};

struct RetryPolicy {
  std::uint64_t base_delay_ms = 1000;
  double factor = 2.0;
  int max_attempts = 5;
};

struct GatewayStats {
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t backend_calls = 0;
  std::uint64_t retries = 0;
};

// Cacheable completion front end. Identical requests are answered from a
// content-addressed flat-file cache (one JSON file per key), making warm
// runs byte-reproducible and interrupted runs resumable. Writes go through
// a temp file + rename; concurrent requests for one key are single-flight.
class Gateway {
 public:
  Gateway(std::filesystem::path cache_dir,
          std::shared_ptr<CompletionBackend> backend,
          double requests_per_minute = 0.0,  // 0 = unlimited
          RetryPolicy retry = {}, Clock clock = Clock::system());

  std::string complete(const RequestSpec& spec);

  GatewayStats stats() const;

 private:
  std::optional<std::string> read_cache(const std::string& key) const;
  void write_cache(const std::string& key, const RequestSpec& spec,
                   const std::string& response) const;

  std::filesystem::path cache_dir_;
  std::shared_ptr<CompletionBackend> backend_;
  std::optional<RateLimiter> limiter_;
  RetryPolicy retry_;
  Clock clock_;

  mutable std::mutex mutex_;
  std::condition_variable in_flight_cv_;
  std::unordered_set<std::string> in_flight_;
  GatewayStats stats_;
};

// Finds the first option label appearing as a standalone answer token.
// Pattern order: leading label, "(X)", "answer is X", "答案是X".
// Labels must be distinct single codepoints. nullopt = unparseable.
std::optional<std::string> extract_choice(std::string_view response,
                                          std::span<const std::string> labels);

}  // namespace noiseval
