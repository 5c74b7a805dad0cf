// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rhetoric/error.hpp"
#include "rhetoric/log.hpp"

namespace rhetoric {

enum class Role { System, User, Assistant };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

struct ChatMessage {
  Role role;
  std::string text;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 512;
  /// Template the request was rendered from; empty when untagged.
  std::string template_id;
  /// Bindings used for rendering. Metadata only: never sent, never hashed.
  std::map<std::string, std::string> bindings;

  void validate() const {
    if (messages.empty()) throw Error(ErrorKind::InvalidArgument, "chat request has no messages");
    if (messages.front().role == Role::Assistant) {
      throw Error(ErrorKind::InvalidArgument, "first message must be system or user");
    }
    if (temperature < 0.0) throw Error(ErrorKind::InvalidArgument, "negative temperature");
    if (max_tokens <= 0) throw Error(ErrorKind::InvalidArgument, "max_tokens must be positive");
  }
};

struct BackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "LLM_API_KEY";
  int max_retries = 2;
  int backoff_ms = 500;
  int max_in_flight = 4;

  void validate() const {
    if (max_in_flight < 1) throw Error(ErrorKind::InvalidArgument, "max_in_flight must be >= 1");
    if (max_retries < 0) throw Error(ErrorKind::InvalidArgument, "max_retries must be >= 0");
    if (backoff_ms < 1) throw Error(ErrorKind::InvalidArgument, "backoff_ms must be positive");
  }
};

// ---------------------------------------------------------------------------
// Templates

namespace detail {

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

/// Calls on_text(literal) and on_placeholder(name) in body order. Braces that
/// do not enclose an identifier are literal text.
template <typename OnText, typename OnPlaceholder>
void scan_placeholders(std::string_view body, OnText&& on_text, OnPlaceholder&& on_placeholder) {
  std::size_t literal_start = 0;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{' && i + 1 < body.size() && is_ident_start(body[i + 1])) {
      std::size_t j = i + 1;
      while (j < body.size() && is_ident_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}') {
        on_text(body.substr(literal_start, i - literal_start));
        on_placeholder(body.substr(i + 1, j - i - 1));
        i = j + 1;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  on_text(body.substr(literal_start));
}

}  // namespace detail

struct PromptTemplate {
  std::string template_id;
  std::string body;

  /// Distinct placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const {
    std::vector<std::string> names;
    detail::scan_placeholders(
        body, [](std::string_view) {},
        [&](std::string_view name) {
          if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
        });
    return names;
  }

  std::string render(const std::map<std::string, std::string>& bindings) const {
    std::vector<std::string> missing;
    std::string out;
    out.reserve(body.size());
    detail::scan_placeholders(
        body, [&](std::string_view text) { out.append(text); },
        [&](std::string_view name) {
          auto it = bindings.find(std::string(name));
          if (it == bindings.end()) {
            if (std::find(missing.begin(), missing.end(), name) == missing.end()) missing.emplace_back(name);
          } else {
            out.append(it->second);
          }
        });
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
      throw Error(ErrorKind::MissingBinding, list);
    }
    return out;
  }
};

/// Substitutes known bindings and leaves every other `{name}` untouched.
inline std::string render_lenient(std::string_view body, const std::map<std::string, std::string>& bindings) {
  std::string out;
  detail::scan_placeholders(
      body, [&](std::string_view text) { out.append(text); },
      [&](std::string_view name) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) {
          out.push_back('{');
          out.append(name);
          out.push_back('}');
        } else {
          out.append(it->second);
        }
      });
  return out;
}

class TemplateRegistry {
 public:
  void add(PromptTemplate t) {
    auto id = t.template_id;
    templates_[id] = std::move(t);
  }

  bool contains(const std::string& id) const { return templates_.count(id) != 0; }

  const PromptTemplate& get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw Error(ErrorKind::UnknownTemplate, id);
    return it->second;
  }

  std::string render(const std::string& template_id, const std::map<std::string, std::string>& bindings) const {
    return get(template_id).render(bindings);
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
  }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// ---------------------------------------------------------------------------
// Fingerprints

namespace detail {

struct Fnv1a64 {
  std::uint64_t state = 0xcbf29ce484222325ULL;

  void bytes(std::string_view s) {
    for (unsigned char c : s) {
      state ^= c;
      state *= 0x100000001b3ULL;
    }
  }
  void field(std::string_view tag, std::string_view s) {
    bytes(tag);
    bytes(std::to_string(s.size()));
    bytes(":");
    bytes(s);
  }
};

}  // namespace detail

/// Stable 16-hex-digit digest of (model, template tag, ordered messages).
/// Length prefixes keep field boundaries unambiguous.
inline std::string mock_fingerprint(const ChatRequest& request) {
  detail::Fnv1a64 h;
  h.field("m", request.model_id);
  h.field("t", request.template_id);
  for (const auto& msg : request.messages) h.field(to_string(msg.role), msg.text);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[(h.state >> (4 * (15 - i))) & 0xF];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Backends

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Returns assistant text or throws Error{Transport, RateLimited, Auth}.
  virtual std::string send(const ChatRequest& request) = 0;
  /// Whether this backend talks to a network service.
  virtual bool is_live() const { return false; }
};

/// Scripted replies for offline runs.
///
/// Lookup order per request: exact fingerprint, then the template's fallback
/// queue (consumed front to back), then the template's cycle list (entry chosen
/// by fingerprint, so the pick does not depend on call order). Reply text may
/// reference `{fingerprint}` and any of the request's bindings.
struct MockScript {
  std::map<std::string, std::string> replies;
  std::map<std::string, std::deque<std::string>> queues;
  std::map<std::string, std::vector<std::string>> cycles;

  static MockScript from_json(const nlohmann::json& j) {
    MockScript s;
    if (j.contains("replies")) {
      for (auto& [k, v] : j.at("replies").items()) s.replies[k] = v.get<std::string>();
    }
    if (j.contains("queues")) {
      for (auto& [k, v] : j.at("queues").items()) {
        for (auto& e : v) s.queues[k].push_back(e.get<std::string>());
      }
    }
    if (j.contains("cycles")) {
      for (auto& [k, v] : j.at("cycles").items()) {
        for (auto& e : v) s.cycles[k].push_back(e.get<std::string>());
      }
    }
    return s;
  }
};

class MockBackend : public ChatBackend {
 public:
  MockBackend() = default;
  explicit MockBackend(MockScript script) : script_(std::move(script)) {}

  void script_reply(const std::string& fingerprint, std::string reply) {
    std::lock_guard lock(mu_);
    script_.replies[fingerprint] = std::move(reply);
  }
  void script_reply(const ChatRequest& request, std::string reply) {
    script_reply(mock_fingerprint(request), std::move(reply));
  }
  void enqueue(const std::string& template_id, std::string reply) {
    std::lock_guard lock(mu_);
    script_.queues[template_id].push_back(std::move(reply));
  }
  void set_cycle(const std::string& template_id, std::vector<std::string> replies) {
    std::lock_guard lock(mu_);
    script_.cycles[template_id] = std::move(replies);
  }

  std::string send(const ChatRequest& request) override {
    request.validate();
    const std::string fp = mock_fingerprint(request);
    std::string raw;
    {
      std::lock_guard lock(mu_);
      ++calls_;
      if (auto it = script_.replies.find(fp); it != script_.replies.end()) {
        raw = it->second;
      } else if (auto q = script_.queues.find(request.template_id);
                 q != script_.queues.end() && !q->second.empty()) {
        raw = std::move(q->second.front());
        q->second.pop_front();
      } else if (auto c = script_.cycles.find(request.template_id);
                 c != script_.cycles.end() && !c->second.empty()) {
        const auto pick = std::stoull(fp, nullptr, 16) % c->second.size();
        raw = c->second[pick];
      } else {
        throw Error(ErrorKind::Transport, "mock has no reply for template '" + request.template_id +
                                              "' fingerprint " + fp);
      }
    }
    auto bindings = request.bindings;
    bindings["fingerprint"] = fp;
    return render_lenient(raw, bindings);
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

 private:
  mutable std::mutex mu_;
  MockScript script_;
  std::size_t calls_ = 0;
};

// ---------------------------------------------------------------------------
// Gateway

/// Counting semaphore with a runtime bound.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit) : available_(limit) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

/// Sampling settings for the two families of prompts.
struct PromptSettings {
  std::string model_id = "gpt-4o";
  double generation_temperature = 0.7;
  double judge_temperature = 0.0;
  int max_tokens = 512;
};

/// Shared entry point for every model call: templates, bounded concurrency,
/// and retry with exponential backoff.
class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  Gateway(std::shared_ptr<ChatBackend> backend, BackendConfig config = {}, PromptSettings settings = {},
          TemplateRegistry templates = {})
      : backend_(std::move(backend)),
        config_((config.validate(), config)),
        settings_(std::move(settings)),
        templates_(std::move(templates)),
        limiter_(config_.max_in_flight),
        sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

  const BackendConfig& config() const { return config_; }
  const PromptSettings& settings() const { return settings_; }
  TemplateRegistry& templates() { return templates_; }
  const TemplateRegistry& templates() const { return templates_; }
  ChatBackend& backend() { return *backend_; }

  void set_sleeper(Sleeper s) { sleeper_ = std::move(s); }

  std::string render_prompt(const std::string& template_id,
                            const std::map<std::string, std::string>& bindings) const {
    return templates_.render(template_id, bindings);
  }

  /// Builds a request from `<id>.system` (optional) and `<id>.user` templates.
  ChatRequest prompt(const std::string& id, const std::map<std::string, std::string>& bindings,
                     bool judge) const {
    ChatRequest req;
    req.model_id = settings_.model_id;
    req.temperature = judge ? settings_.judge_temperature : settings_.generation_temperature;
    req.max_tokens = settings_.max_tokens;
    req.template_id = id;
    req.bindings = bindings;
    if (templates_.contains(id + ".system")) {
      req.messages.push_back({Role::System, templates_.render(id + ".system", bindings)});
    }
    req.messages.push_back({Role::User, templates_.render(id + ".user", bindings)});
    return req;
  }

  std::string complete(const ChatRequest& request) {
    request.validate();
    limiter_.acquire();
    struct Release {
      InFlightLimiter& l;
      ~Release() { l.release(); }
    } release{limiter_};

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) {
        sleeper_(std::chrono::milliseconds(static_cast<long long>(config_.backoff_ms) << (attempt - 1)));
      }
      try {
        return backend_->send(request);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::RateLimited || (e.kind() == ErrorKind::Transport && e.retryable())) {
          last_error = e.what();
          continue;
        }
        throw;
      }
    }
    throw Error(ErrorKind::Transport, "retries exhausted after " + std::to_string(config_.max_retries + 1) +
                                          " attempts; last error: " + last_error);
  }

 private:
  std::shared_ptr<ChatBackend> backend_;
  BackendConfig config_;
  PromptSettings settings_;
  TemplateRegistry templates_;
  InFlightLimiter limiter_;
  Sleeper sleeper_;
};

/// Sends `request` and parses the reply; on ParseFailure re-asks once with the
/// failed reply and `format_hint` appended, then gives up with ParseFailure.
template <typename Parser>
auto ask_parsed(Gateway& gw, ChatRequest request, Parser&& parse, std::string_view format_hint)
    -> decltype(parse(std::string{})) {
  std::string reply = gw.complete(request);
  try {
    return parse(reply);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseFailure) throw;
  }
  request.messages.push_back({Role::Assistant, reply});
  request.messages.push_back(
      {Role::User, "Your previous reply could not be parsed. " + std::string(format_hint)});
  reply = gw.complete(request);
  return parse(reply);
}

/// Extracts YES/NO, case-insensitively, from the first word of the first
/// non-empty line.
inline bool parse_yes_no(std::string_view reply) {
  std::size_t pos = 0;
  while (pos < reply.size()) {
    auto end = reply.find('\n', pos);
    if (end == std::string_view::npos) end = reply.size();
    auto line = reply.substr(pos, end - pos);
    std::size_t b = 0;
    while (b < line.size() && !detail::is_ident_char(line[b])) ++b;
    std::size_t e = b;
    while (e < line.size() && detail::is_ident_char(line[e])) ++e;
    if (e > b) {
      std::string word(line.substr(b, e - b));
      for (auto& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (word == "YES") return true;
      if (word == "NO") return false;
      throw Error(ErrorKind::ParseFailure, "expected YES or NO, got '" + std::string(line) + "'");
    }
    pos = end + 1;
  }
  throw Error(ErrorKind::ParseFailure, "empty reply");
}

}  // namespace rhetoric
