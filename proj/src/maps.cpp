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

#include "uavcover/maps.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavcover/errors.hpp"

namespace uavcover {
namespace {

// Keep in sync with maps/*.map (checked by test_maps).
constexpr std::array<BundledMap, 5> kBundled = {{
    {"grove_5x5",
     ".....\n"
     ".#.#.\n"
     ".....\n"
     ".#.#.\n"
     ".....\n",
     "regularly spaced obstacle islands, like an olive grove; symmetric"},
    {"corners_6x6",
     "......\n"
     "##..##\n"
     "......\n"
     "......\n"
     "##..##\n"
     "......\n",
     "dead-end corner pockets that force turning back; symmetric"},
    {"asymmetric_7x7",
     ".......\n"
     ".##..#.\n"
     ".#...#.\n"
     "...#...\n"
     ".#.##..\n"
     ".#.....\n"
     "...##.#\n",
     "irregular obstacles without horizontal or vertical symmetry"},
    {"diagonal_8x8",
     "........\n"
     ".#...#..\n"
     "..#...#.\n"
     "...#....\n"
     "....#...\n"
     ".#...#..\n"
     "..#...#.\n"
     "........\n",
     "obstacles arranged along diagonal lines"},
    {"block_9x9",
     ".........\n"
     ".........\n"
     "..#####..\n"
     "..#......\n"
     "..#.###..\n"
     "..#......\n"
     "..#####..\n"
     ".........\n"
     ".........\n",
     "a single large obstacle to circle, with concave corners"},
}};

}  // namespace

std::span<const BundledMap> bundled_maps() noexcept { return kBundled; }

const BundledMap* find_bundled_map(std::string_view id) noexcept {
  for (const BundledMap& m : kBundled) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

GridMap load_map(const std::string& id_or_path) {
  if (const BundledMap* m = find_bundled_map(id_or_path)) {
    return parse_map(m->text);
  }
  std::ifstream in(id_or_path, std::ios::binary);
  if (!in) {
    throw ConfigError("map not found: '" + id_or_path +
                      "' is neither a bundled map nor a readable file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_map(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(id_or_path + ": " + e.what());
  }
}

}  // namespace uavcover
