#pragma once

#include "jdtc/state_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace jdtc {

struct GatingConfig {
  bool enabled = true;
  /// Mahalanobis radius under the destination mode's kernel covariance.
  double radius = 8.0;
};

struct ParticlePair {
  std::size_t from = 0;
  std::size_t to = 0;
  double sq_distance = 0.0;
};

/// Uniform grid over 2-D anchor positions, one per motion mode. Cell edge is
/// radius * (largest position sigma of that mode's kernel), so every pair
/// inside the Mahalanobis gate lies in the 3x3 block around the destination.
class AnchorGrid {
 public:
  AnchorGrid(std::span<const Vector5> anchors, double cell);

  template <typename Fn>
  void for_each_candidate(double x, double y, Fn&& fn) const {
    const std::int64_t ix = cell_coord(x);
    const std::int64_t iy = cell_coord(y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const std::uint64_t key = pack(ix + dx, iy + dy);
        auto lo = std::lower_bound(keys_.begin(), keys_.end(), key);
        for (auto it = lo; it != keys_.end() && *it == key; ++it) {
          fn(order_[static_cast<std::size_t>(it - keys_.begin())]);
        }
      }
    }
  }

 private:
  [[nodiscard]] std::int64_t cell_coord(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }
  static std::uint64_t pack(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix + (1LL << 31)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy + (1LL << 31)));
  }

  double cell_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::size_t> order_;
};

/// Enumerates (from, to) pairs for a Gaussian kernel N_r(x_to; anchor_r(from), S_r),
/// r = mode of the destination. `anchors[r][s]` is the kernel mean for source s
/// under destination mode r. With gating disabled every pair is visited; with
/// gating enabled only pairs with squared Mahalanobis distance <= radius^2.
/// Destinations are visited in index order, sources per destination in
/// ascending index order. fn(from, to, sq_distance).
template <typename Fn>
void visit_kernel_pairs(const std::array<std::vector<Vector5>, kNumModes>& anchors,
                        std::span<const Particle> to, const std::array<const ModeGaussian*, kNumModes>& kernels,
                        const GatingConfig& gate, Fn&& fn) {
  const std::size_t num_from = anchors[0].size();
  if (num_from == 0 || to.empty()) return;

  const bool full = !gate.enabled || std::isinf(gate.radius);
  if (full) {
    for (std::size_t q = 0; q < to.size(); ++q) {
      const int m = mode_index(to[q].state.mode);
      const auto& kernel = *kernels[static_cast<std::size_t>(m)];
      const auto& anchor = anchors[static_cast<std::size_t>(m)];
      for (std::size_t s = 0; s < num_from; ++s) {
        fn(s, q, kernel.sq_mahalanobis(to[q].state.kin - anchor[s]));
      }
    }
    return;
  }

  const double r2 = gate.radius * gate.radius;
  std::array<AnchorGrid, kNumModes> grids{
      AnchorGrid(anchors[0], gate.radius * kernels[0]->position_sigma()),
      AnchorGrid(anchors[1], gate.radius * kernels[1]->position_sigma())};
  std::vector<std::size_t> candidates;
  for (std::size_t q = 0; q < to.size(); ++q) {
    const auto& kin = to[q].state.kin;
    const int m = mode_index(to[q].state.mode);
    const auto& kernel = *kernels[static_cast<std::size_t>(m)];
    const auto& anchor = anchors[static_cast<std::size_t>(m)];
    candidates.clear();
    grids[static_cast<std::size_t>(m)].for_each_candidate(kin[axis::kX], kin[axis::kY],
                                                          [&](std::size_t s) { candidates.push_back(s); });
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t s : candidates) {
      const double sq = kernel.sq_mahalanobis(kin - anchor[s]);
      if (sq <= r2) fn(s, q, sq);
    }
  }
}

/// Transition-kernel pairs between particles at t and t+1 under the motion
/// model's mode-matched process covariance.
std::vector<ParticlePair> gated_pairs(std::span<const Particle> from, std::span<const Particle> to,
                                      const MotionModel& motion, const GatingConfig& gate);

/// Kernel means of `from` under each destination mode.
std::array<std::vector<Vector5>, kNumModes> transition_anchors(std::span<const Particle> from,
                                                               const MotionModel& motion);

}  // namespace jdtc
