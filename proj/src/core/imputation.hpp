#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/gower.hpp"

namespace mgower {

struct ImputationOptions {
  std::optional<std::size_t> max_uses;  // per donor; unlimited by default
  bool pooled_stats = false;            // stats from recipients + donors instead of donors only
};

struct ImputationResult {
  Dataset completed;
  std::vector<std::size_t> recipients;  // row indices in the input with the target missing
  std::vector<std::size_t> donors;      // chosen donor row index (input numbering), per recipient
  std::vector<double> distances;        // distance to the chosen donor
  std::vector<std::size_t> ties;        // donors tied at the chosen distance
};

// Nearest-neighbour donor hotdeck: every row with `target` missing receives
// the target value of its closest row with `target` observed. Distances use
// every included column except the target. Ties are broken with
// config.tie_seed.
ImputationResult nn_hotdeck(const Dataset& data, const std::string& target, DistanceConfig config,
                            const ImputationOptions& options = {});

}  // namespace mgower
