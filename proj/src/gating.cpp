#include "jdtc/gating.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace jdtc {

AnchorGrid::AnchorGrid(std::span<const Vector5> anchors, double cell) : cell_(cell) {
  if (!(cell > 0.0) || !std::isfinite(cell)) throw std::invalid_argument("AnchorGrid: cell size must be positive");
  std::vector<std::uint64_t> raw(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    raw[i] = pack(cell_coord(anchors[i][axis::kX]), cell_coord(anchors[i][axis::kY]));
  }
  order_.resize(anchors.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  keys_.resize(anchors.size());
  for (std::size_t i = 0; i < order_.size(); ++i) keys_[i] = raw[order_[i]];
}

std::array<std::vector<Vector5>, kNumModes> transition_anchors(std::span<const Particle> from,
                                                               const MotionModel& motion) {
  std::array<std::vector<Vector5>, kNumModes> anchors;
  for (int m = 0; m < kNumModes; ++m) {
    auto& a = anchors[static_cast<std::size_t>(m)];
    a.reserve(from.size());
    for (const auto& p : from) a.push_back(motion.predict_mean(p.state.kin, mode_from_index(m)));
  }
  return anchors;
}

std::vector<ParticlePair> gated_pairs(std::span<const Particle> from, std::span<const Particle> to,
                                      const MotionModel& motion, const GatingConfig& gate) {
  if (gate.enabled && !(gate.radius > 0.0)) throw std::invalid_argument("gating radius must be > 0");
  std::vector<ParticlePair> pairs;
  const auto anchors = transition_anchors(from, motion);
  visit_kernel_pairs(anchors, to, {&motion.noise(MotionMode::kCV), &motion.noise(MotionMode::kCT)}, gate,
                     [&](std::size_t s, std::size_t q, double sq) { pairs.push_back({s, q, sq}); });
  return pairs;
}

}  // namespace jdtc
