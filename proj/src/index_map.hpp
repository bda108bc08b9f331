#pragma once

#include <cstddef>
#include <vector>

#include "causalproc/tensor.hpp"

namespace causalproc::detail {

inline std::vector<std::size_t> strides_of(const std::vector<SystemId>& systems) {
  std::vector<std::size_t> s(systems.size(), 1);
  for (std::size_t i = systems.size(); i-- > 1;) {
    s[i - 1] = s[i] * static_cast<std::size_t>(systems[i].dim);
  }
  return s;
}

/// Offsets into the full index for every multi-index over the systems at
/// `positions`, enumerated lexicographically in the order of `positions`.
inline std::vector<std::size_t> offsets_of(const std::vector<SystemId>& systems,
                                           const std::vector<std::size_t>& positions) {
  const auto strides = strides_of(systems);
  std::vector<std::size_t> out{0};
  for (std::size_t p : positions) {
    const auto d = static_cast<std::size_t>(systems[p].dim);
    std::vector<std::size_t> next;
    next.reserve(out.size() * d);
    for (std::size_t base : out) {
      for (std::size_t k = 0; k < d; ++k) next.push_back(base + k * strides[p]);
    }
    out = std::move(next);
  }
  return out;
}

/// Positions (in `systems`) of the given labels; throws on unknown labels or
/// repeats.
std::vector<std::size_t> positions_of(const std::vector<SystemId>& systems, const Labels& labels);

/// Positions not listed in `taken`, in system order.
std::vector<std::size_t> complement_positions(std::size_t n, const std::vector<std::size_t>& taken);

}  // namespace causalproc::detail
