// Copyright 2026 The dfsd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dfsd/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace dfsd {

namespace {

std::atomic<int> g_level{static_cast<int>(Verbosity::info)};
std::mutex g_mutex;

void emit(const char* tag, std::string_view message) {
  std::lock_guard lock(g_mutex);
  std::cerr << tag << message << '\n';
}

}  // namespace

Verbosity verbosity() { return static_cast<Verbosity>(g_level.load()); }
void set_verbosity(Verbosity level) { g_level.store(static_cast<int>(level)); }

void init_verbosity_from_env() {
  const char* env = std::getenv("DFSD_VERBOSITY");
  if (!env) return;
  const std::string v(env);
  if (v == "quiet" || v == "0") set_verbosity(Verbosity::quiet);
  else if (v == "info" || v == "1") set_verbosity(Verbosity::info);
  else if (v == "debug" || v == "2") set_verbosity(Verbosity::debug);
}

void log_info(std::string_view message) {
  if (verbosity() >= Verbosity::info) emit("[dfsd] ", message);
}

void log_debug(std::string_view message) {
  if (verbosity() >= Verbosity::debug) emit("[dfsd:debug] ", message);
}

void log_warning(std::string_view message) {
  if (verbosity() != Verbosity::quiet) emit("[dfsd] warning: ", message);
}

}  // namespace dfsd
