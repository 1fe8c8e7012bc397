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

#pragma once

#include <string_view>

namespace dfsd {

enum class Verbosity { quiet = 0, info = 1, debug = 2 };

Verbosity verbosity();
void set_verbosity(Verbosity level);
/// Reads DFSD_VERBOSITY (quiet|info|debug or 0|1|2); unset or unknown keeps the default.
void init_verbosity_from_env();

void log_info(std::string_view message);
void log_debug(std::string_view message);
/// Printed unless verbosity is quiet.
void log_warning(std::string_view message);

}  // namespace dfsd
