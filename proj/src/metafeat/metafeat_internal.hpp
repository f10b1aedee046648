// Copyright 2026 The anomgym Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <string>
#include <vector>

namespace anomgym::meta {

/// sorted must be ascending and non-empty.
double quantile(const std::vector<double>& sorted, double q);

void append_group_names(std::vector<std::string>& out, const std::string& prefix);
void statistical_names(std::vector<std::string>& out);

}  // namespace anomgym::meta
