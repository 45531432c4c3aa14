#pragma once

// Shared helper for finite-difference gradient checks: a probe is only valid
// when the +-h evaluations keep every leaky-relu pre-activation on the same
// side of zero, otherwise the central difference straddles a subgradient
// jump.

#include <vector>

#include "ghostqc/nn.hpp"

namespace ghostqc::testing {

inline void collect_signs(const nn::ForwardCache& c, std::vector<bool>& out) {
  auto push_vec = [&out](const std::vector<double>& v) {
    for (double x : v) out.push_back(x >= 0.0);
  };
  auto push_tensor = [&out](const nn::Tensor& t) {
    for (double x : t.data) out.push_back(x >= 0.0);
  };
  push_vec(c.front_pre);
  push_vec(c.proj_pre);
  push_tensor(c.stem_pre);
  for (const auto& b : c.down) {
    push_tensor(b.pre1);
    push_tensor(b.sum);
  }
  for (const auto& b : c.up) {
    push_tensor(b.pre1);
    push_tensor(b.sum);
  }
}

inline bool same_activation_pattern(const nn::ForwardCache& a, const nn::ForwardCache& b) {
  std::vector<bool> sa, sb;
  collect_signs(a, sa);
  collect_signs(b, sb);
  return sa == sb;
}

}  // namespace ghostqc::testing
