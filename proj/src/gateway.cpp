#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "noiseval/gateway.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <chrono>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "noiseval/errors.hpp"
#include "noiseval/report.hpp"

namespace noiseval {

void RequestSpec::validate() const {
  if (model.empty()) throw ValidationError("request needs a model id");
  if (temperature < 0.0 || temperature > 2.0) {
    throw ValidationError("temperature must be in [0, 2]");
  }
  if (max_output <= 0) throw ValidationError("max_output must be positive");
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0F]);
  }
  return out;
}

std::string request_key(const RequestSpec& spec) {
  char temp[64];
  std::snprintf(temp, sizeof(temp), "%.17g", spec.temperature);
  std::string material;
  material += spec.model;
  material += '\x1f';
  material += temp;
  material += '\x1f';
  material += spec.prompt;
  return sha256_hex(material);
}

Clock Clock::system() {
  Clock clock;
  clock.now_ms = [] {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
  };
  clock.sleep_ms = [](std::uint64_t ms) {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  };
  return clock;
}

Clock Clock::simulated(std::shared_ptr<std::atomic<std::uint64_t>> time) {
  Clock clock;
  clock.now_ms = [time] { return time->load(); };
  clock.sleep_ms = [time](std::uint64_t ms) { time->fetch_add(ms); };
  return clock;
}

RateLimiter::RateLimiter(double requests_per_minute, Clock clock)
    : clock_(std::move(clock)) {
  if (requests_per_minute <= 0.0) {
    throw ValidationError("requests-per-minute ceiling must be positive");
  }
  interval_ms_ =
      static_cast<std::uint64_t>(std::ceil(60000.0 / requests_per_minute));
}

std::uint64_t RateLimiter::acquire() {
  std::uint64_t slot;
  std::uint64_t now;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    now = clock_.now_ms();
    slot = std::max(now, next_slot_ms_);
    next_slot_ms_ = slot + interval_ms_;
  }
  if (slot > now) clock_.sleep_ms(slot - now);
  return slot;
}

MockBackend::MockBackend(std::map<std::string, std::string> fixtures,
                         bool strict)
    : fixtures_(std::move(fixtures)), strict_(strict) {}

MockBackend MockBackend::from_fixture_file(const std::filesystem::path& path,
                                           bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open mock fixtures: " + path.string());
  std::map<std::string, std::string> fixtures;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      fixtures[j.at("prompt").get<std::string>()] =
          j.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return MockBackend(std::move(fixtures), strict);
}

std::string MockBackend::complete(const RequestSpec& spec) {
  auto it = fixtures_.find(spec.prompt);
  if (it != fixtures_.end()) return it->second;
  if (strict_) {
    throw ValidationError("mock backend has no fixture for prompt (key " +
                          request_key(spec).substr(0, 12) + ")");
  }
  return "MOCK:" + request_key(spec).substr(0, 16);
}

namespace {
std::atomic<std::uint64_t> g_http_backend_instances{0};
}

HttpBackend::HttpBackend(std::string base_url, std::string path,
                         std::string api_key)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      api_key_(std::move(api_key)) {
  if (api_key_.empty()) {
    throw AuthError("no API credential configured");
  }
  g_http_backend_instances.fetch_add(1);
}

std::uint64_t HttpBackend::instances_created() {
  return g_http_backend_instances.load();
}

std::string HttpBackend::complete(const RequestSpec& spec) {
  nlohmann::json body{
      {"model", spec.model},
      {"temperature", spec.temperature},
      {"max_tokens", spec.max_output},
      {"messages",
       nlohmann::json::array(
           {nlohmann::json{{"role", "user"}, {"content", spec.prompt}}})}};

  httplib::Client client(base_url_);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);

  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransientBackendError("connection to " + base_url_ + " failed: " +
                                httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("backend rejected credential (HTTP " +
                    std::to_string(res->status) + ")");
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientBackendError("backend returned HTTP " +
                                std::to_string(res->status));
  }
  if (res->status != 200) {
    throw ValidationError("backend returned HTTP " +
                          std::to_string(res->status) + ": " + res->body);
  }
  try {
    nlohmann::json j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed backend response: ") +
                          e.what());
  }
}

Gateway::Gateway(std::filesystem::path cache_dir,
                 std::shared_ptr<CompletionBackend> backend,
                 double requests_per_minute, RetryPolicy retry, Clock clock)
    : cache_dir_(std::move(cache_dir)),
      backend_(std::move(backend)),
      retry_(retry),
      clock_(std::move(clock)) {
  if (requests_per_minute > 0.0) {
    limiter_.emplace(requests_per_minute, clock_);
  }
  std::filesystem::create_directories(cache_dir_);
}

std::optional<std::string> Gateway::read_cache(const std::string& key) const {
  const std::filesystem::path path = cache_dir_ / (key + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    return j.at("response").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("corrupt cache entry " + path.string() + ": " +
                          e.what());
  }
}

void Gateway::write_cache(const std::string& key, const RequestSpec& spec,
                          const std::string& response) const {
  nlohmann::json j{{"key", key},
                   {"model", spec.model},
                   {"temperature", spec.temperature},
                   {"prompt", spec.prompt},
                   {"response", response},
                   {"timestamp_ms", clock_.now_ms()},
                   {"backend", backend_->name()}};
  // Single-flight per key, so `<key>.tmp` has exactly one writer.
  write_file_atomic(cache_dir_ / (key + ".json"), j.dump());
}

std::string Gateway::complete(const RequestSpec& spec) {
  spec.validate();
  const std::string key = request_key(spec);

  while (true) {
    if (auto cached = read_cache(key)) {
      std::lock_guard<std::mutex> lock(mutex_);
      ++stats_.cache_hits;
      return *cached;
    }
    std::unique_lock<std::mutex> lock(mutex_);
    if (in_flight_.count(key) == 0) {
      in_flight_.insert(key);
      ++stats_.cache_misses;
      break;
    }
    in_flight_cv_.wait(lock, [&] { return in_flight_.count(key) == 0; });
    // Re-check the cache: the other flight normally filled it.
  }

  struct FlightGuard {
    Gateway* gateway;
    const std::string& key;
    ~FlightGuard() {
      std::lock_guard<std::mutex> lock(gateway->mutex_);
      gateway->in_flight_.erase(key);
      gateway->in_flight_cv_.notify_all();
    }
  } guard{this, key};

  std::string response;
  std::uint64_t delay = retry_.base_delay_ms;
  for (int attempt = 1;; ++attempt) {
    try {
      if (limiter_.has_value()) limiter_->acquire();
      {
        std::lock_guard<std::mutex> lock(mutex_);
        ++stats_.backend_calls;
      }
      response = backend_->complete(spec);
      break;
    } catch (const TransientBackendError& e) {
      if (attempt >= retry_.max_attempts) {
        throw BackendExhaustedError(std::string("retries exhausted: ") +
                                    e.what());
      }
      {
        std::lock_guard<std::mutex> lock(mutex_);
        ++stats_.retries;
      }
      clock_.sleep_ms(delay);
      delay = static_cast<std::uint64_t>(static_cast<double>(delay) *
                                         retry_.factor);
    }
  }

  write_cache(key, spec, response);
  return response;
}

GatewayStats Gateway::stats() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return stats_;
}

namespace {

bool is_ascii_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// True when `text` starts with `label` followed by a token boundary.
bool label_at(std::string_view text, const std::string& label) {
  if (!text.starts_with(label)) return false;
  if (text.size() == label.size()) return true;
  return !is_ascii_alnum(text[label.size()]);
}

std::optional<std::string> label_after(
    std::string_view text, std::size_t pos,
    std::span<const std::string> labels) {
  static constexpr std::string_view kSkips[] = {
      " ", "\t", ":", "\"", "'", "*", "：", "“", "”", "（", "("};
  while (pos < text.size()) {
    bool skipped = false;
    for (std::string_view skip : kSkips) {
      if (text.substr(pos).starts_with(skip)) {
        pos += skip.size();
        skipped = true;
        break;
      }
    }
    if (!skipped) break;
  }
  for (const std::string& label : labels) {
    if (label_at(text.substr(pos), label)) return label;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_choice(
    std::string_view response, std::span<const std::string> labels) {
  if (labels.empty()) throw ValidationError("no option labels given");
  for (const std::string& label : labels) {
    if (label.empty()) throw ValidationError("empty option label");
  }

  // 1. Leading label, optionally parenthesized.
  {
    std::size_t pos = 0;
    while (pos < response.size()) {
      const char c = response[pos];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '"' ||
          c == '\'') {
        ++pos;
        continue;
      }
      break;
    }
    const std::string_view rest = response.substr(pos);
    for (const std::string& label : labels) {
      if (label_at(rest, label)) return label;
      if (rest.starts_with("(" + label + ")") ||
          rest.starts_with("（" + label + "）")) {
        return label;
      }
    }
  }

  // 2. Parenthesized label anywhere, earliest occurrence.
  {
    std::size_t best = std::string_view::npos;
    std::string best_label;
    for (const std::string& label : labels) {
      for (std::string_view open : {"(", "（"}) {
        const std::string needle =
            std::string(open) + label + (open == "(" ? ")" : "）");
        const std::size_t at = response.find(needle);
        if (at != std::string_view::npos && at < best) {
          best = at;
          best_label = label;
        }
      }
    }
    if (best != std::string_view::npos) return best_label;
  }

  // 3. "answer is X" (case-insensitive anchor).
  {
    std::string lowered(response);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) {
                     return static_cast<char>(std::tolower(c));
                   });
    for (std::string_view anchor : {"answer is", "answer:"}) {
      std::size_t at = 0;
      while ((at = lowered.find(anchor, at)) != std::string::npos) {
        if (auto label =
                label_after(response, at + anchor.size(), labels)) {
          return label;
        }
        at += anchor.size();
      }
    }
  }

  // 4. Chinese answer anchors.
  for (std::string_view anchor : {"答案是", "答案为", "答案："}) {
    std::size_t at = 0;
    while ((at = response.find(anchor, at)) != std::string_view::npos) {
      if (auto label = label_after(response, at + anchor.size(), labels)) {
        return label;
      }
      at += anchor.size();
    }
  }

  return std::nullopt;
}

}  // namespace noiseval
