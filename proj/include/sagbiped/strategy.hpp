// Copyright 2026 The sagbiped Authors
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

namespace sagbiped {

enum class Strategy { kAnkle, kHip, kStep };

/// margin >= 0: ankle; hip_threshold <= margin < 0: hip; below: step.
inline Strategy strategy_select(double margin, double hip_threshold) {
  if (margin >= 0.0) return Strategy::kAnkle;
  if (margin >= hip_threshold) return Strategy::kHip;
  return Strategy::kStep;
}

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kAnkle:
      return "ankle";
    case Strategy::kHip:
      return "hip";
    case Strategy::kStep:
      return "step";
  }
  return "ankle";
}

}  // namespace sagbiped
