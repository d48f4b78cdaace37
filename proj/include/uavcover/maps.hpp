// Copyright 2026 The uavcover Authors.
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

#include <span>
#include <string>
#include <string_view>

#include "uavcover/gridworld.hpp"

namespace uavcover {

struct BundledMap {
  std::string_view id;
  std::string_view text;
  std::string_view description;
};

// The five evaluation maps, 5x5 through 9x9.
std::span<const BundledMap> bundled_maps() noexcept;

// nullptr when `id` is not a bundled map.
const BundledMap* find_bundled_map(std::string_view id) noexcept;

// Looks `id_or_path` up among the bundled maps, then as a file path.
// Throws ConfigError when neither exists; parse errors propagate.
GridMap load_map(const std::string& id_or_path);

}  // namespace uavcover
