//
// Copyright 2026 The Phenotyper Authors
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
//

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace phenotyper {

// The four document-level categories. The enumerator value is the position
// used by every per-label vector in the library (fold demand, metric rows,
// head outputs).
enum class Label : std::uint8_t { SI = 0, SA = 1, ES = 2, NSSI = 3 };

inline constexpr std::size_t kNumLabels = 4;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {Label::SI, Label::SA, Label::ES,
                                                             Label::NSSI};

constexpr std::size_t index_of(Label label) { return static_cast<std::size_t>(label); }

constexpr std::string_view label_name(Label label) {
  constexpr std::array<std::string_view, kNumLabels> names = {"SI", "SA", "ES", "NSSI"};
  return names[index_of(label)];
}

inline std::optional<Label> parse_label(std::string_view name) {
  for (Label l : kAllLabels) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

// Subset of the four labels stored as a 4-bit mask.
class LabelSet {
 public:
  constexpr LabelSet() = default;
  constexpr LabelSet(std::initializer_list<Label> labels) {
    for (Label l : labels) insert(l);
  }

  static constexpr LabelSet from_mask(std::uint8_t mask) {
    LabelSet s;
    s.mask_ = mask & 0x0F;
    return s;
  }

  constexpr bool contains(Label l) const { return (mask_ >> index_of(l)) & 1U; }
  constexpr void insert(Label l) { mask_ |= static_cast<std::uint8_t>(1U << index_of(l)); }
  constexpr void erase(Label l) { mask_ &= static_cast<std::uint8_t>(~(1U << index_of(l))); }
  constexpr std::uint8_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::size_t size() const {
    std::size_t n = 0;
    for (Label l : kAllLabels) n += contains(l) ? 1 : 0;
    return n;
  }

  constexpr bool operator==(const LabelSet&) const = default;

  // "SI+SA" style; "none" for the empty set.
  std::string to_string() const {
    if (empty()) return "none";
    std::string out;
    for (Label l : kAllLabels) {
      if (!contains(l)) continue;
      if (!out.empty()) out += '+';
      out += label_name(l);
    }
    return out;
  }

 private:
  std::uint8_t mask_ = 0;
};

}  // namespace phenotyper
