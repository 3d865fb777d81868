// Copyright 2026 The qlab Authors
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

#ifndef QLAB_WARNINGS_HPP
#define QLAB_WARNINGS_HPP

#include <functional>
#include <string>

namespace qlab {

// Warn-and-proceed conditions (truncation tails, small cutoffs) go through
// this sink. The default handler writes to stderr.
using WarningHandler = std::function<void(const std::string&)>;

void warn(const std::string& message);

// Installs a handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace qlab

#endif  // QLAB_WARNINGS_HPP
