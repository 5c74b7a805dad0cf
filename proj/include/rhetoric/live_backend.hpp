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

#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "rhetoric/error.hpp"
#include "rhetoric/gateway.hpp"

namespace rhetoric {

/// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
inline std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = base_url.find('/', host_start);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_start), prefix};
}

inline nlohmann::ordered_json to_wire(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model_id;
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.text}});
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body;
}

/// Extracts `choices[0].message.content`; anything else is a Transport error.
inline std::string from_wire(const std::string& response_body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(response_body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Transport, std::string("malformed chat-completion response: ") + e.what());
  }
}

/// Maps an HTTP status to the gateway's error taxonomy; 2xx returns normally.
inline void check_status(int status, const std::string& body) {
  if (status >= 200 && status < 300) return;
  if (status == 401 || status == 403) throw Error(ErrorKind::Auth, "HTTP " + std::to_string(status));
  if (status == 429) throw Error(ErrorKind::RateLimited, "HTTP 429");
  const bool retryable = status >= 500 || status == 408;
  throw Error(ErrorKind::Transport, "HTTP " + std::to_string(status) + ": " + body.substr(0, 200))
      .set_retryable(retryable);
}

/// OpenAI-compatible `POST {base_url}/chat/completions`.
class LiveBackend : public ChatBackend {
 public:
  explicit LiveBackend(BackendConfig config) : config_(std::move(config)) {
    std::tie(origin_, prefix_) = split_base_url(config_.base_url);
  }

  bool is_live() const override { return true; }

  std::string send(const ChatRequest& request) override {
    request.validate();
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorKind::Auth, "environment variable " + config_.api_key_env + " is not set");
    }
    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post(prefix_ + "/chat/completions", headers, to_wire(request).dump(), "application/json");
    if (!res) {
      throw Error(ErrorKind::Transport, "connection failed: " + httplib::to_string(res.error()))
          .set_retryable(true);
    }
    check_status(res->status, res->body);
    return from_wire(res->body);
  }

 private:
  BackendConfig config_;
  std::string origin_;
  std::string prefix_;
};

}  // namespace rhetoric
