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

#include <string>
#include <vector>

#include <httplib.h>

#include "rhetoric/analysis.hpp"
#include "rhetoric/live_backend.hpp"

namespace rhetoric {

/// Client for a strategy-scoring service: `POST {base_url}/score` with
/// `{"texts": [...]}`, answered by `{"scores": [[c, e, em, mo], ...]}`.
class HttpScorer : public Scorer {
 public:
  explicit HttpScorer(const std::string& base_url, int timeout_s = 60) : timeout_s_(timeout_s) {
    std::tie(origin_, prefix_) = split_base_url(base_url);
  }

  std::vector<std::optional<StrategyScoreVector>> score(const std::vector<std::string>& texts) override {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_s_);
    client.set_read_timeout(timeout_s_);
    auto res = client.Post(prefix_ + "/score", score_request_body(texts), "application/json");
    if (!res) {
      throw Error(ErrorKind::Transport, "scorer unreachable: " + httplib::to_string(res.error())).set_retryable(true);
    }
    check_status(res->status, res->body);
    return parse_score_response(res->body, texts.size());
  }

 private:
  std::string origin_;
  std::string prefix_;
  int timeout_s_;
};

}  // namespace rhetoric
