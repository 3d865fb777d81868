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

#ifndef QLAB_REPORT_HPP
#define QLAB_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

namespace qlab {

// Flat key-value form of a report, consumed by the run manifest.
using Records = std::vector<std::pair<std::string, double>>;

}  // namespace qlab

#endif  // QLAB_REPORT_HPP
