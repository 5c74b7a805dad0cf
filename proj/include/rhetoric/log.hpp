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

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace rhetoric {

/// Process-wide warning sink. Fallback decisions (unparseable replies,
/// empty revisions, ...) are reported here rather than thrown.
class WarningLog {
 public:
  using Sink = std::function<void(const std::string&)>;

  static WarningLog& instance() {
    static WarningLog log;
    return log;
  }

  void warn(const std::string& message) {
    std::lock_guard lock(mu_);
    if (sink_) {
      sink_(message);
    } else {
      std::cerr << "warning: " << message << '\n';
    }
  }

  /// Returns the previous sink so scoped overrides can restore it.
  Sink set_sink(Sink sink) {
    std::lock_guard lock(mu_);
    return std::exchange(sink_, std::move(sink));
  }

 private:
  std::mutex mu_;
  Sink sink_;
};

inline void warn(const std::string& message) { WarningLog::instance().warn(message); }

}  // namespace rhetoric
