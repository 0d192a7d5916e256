#include "jdtc/smoother.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jdtc {

namespace {

// Kernel entries grouped by destination particle (CSR layout).
struct KernelRows {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> source;
  std::vector<double> value;
};

}  // namespace

ParticleIntensity smooth_step(const ParticleIntensity& filtered, const ParticleIntensity& smoothed_next,
                              const TargetModels& models, const GatingConfig& gate) {
  const int num_classes = filtered.num_classes();
  if (smoothed_next.num_classes() != num_classes) throw std::invalid_argument("smooth_step: class count mismatch");
  if (smoothed_next.scan != filtered.scan + 1) {
    throw std::invalid_argument("smooth_step: inputs must be at consecutive scans");
  }
  if (gate.enabled && !(gate.radius > 0.0)) throw std::invalid_argument("gating radius must be > 0");

  const auto& motion = models.motion;
  const auto& spawn = models.spawn;
  const std::array<const ModeGaussian*, kNumModes> motion_kernels{&motion.noise(MotionMode::kCV),
                                                                  &motion.noise(MotionMode::kCT)};
  const std::array<const ModeGaussian*, kNumModes> spawn_kernels{&spawn.noise(MotionMode::kCV),
                                                                 &spawn.noise(MotionMode::kCT)};

  // Spawn sources keep their own position: the spawn kernel is centred on the parent.
  std::vector<std::array<std::vector<Vector5>, kNumModes>> spawn_anchors;
  if (spawn.lambda > 0.0) {
    spawn_anchors.resize(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
      for (auto& a : spawn_anchors[static_cast<std::size_t>(c)]) {
        for (const auto& p : filtered.of(ClassLabel{c})) a.push_back(p.state.kin);
      }
    }
  }

  ParticleIntensity out(num_classes, filtered.scan);
  for (int c = 0; c < num_classes; ++c) {
    const ClassLabel label{c};
    const auto& from = filtered.of(label);
    const auto& to = smoothed_next.of(label);
    const auto& pi = motion.mode_transition(label);

    // Survival kernel K(q | s) = P_s(s) pi(r_s -> r_q) f_{r_q}(x_q | x_s).
    KernelRows rows;
    std::vector<double> mu(to.size(), 0.0);
    {
      const auto anchors = transition_anchors(from, motion);
      std::size_t current = 0;
      visit_kernel_pairs(anchors, std::span<const Particle>(to), motion_kernels, gate,
                         [&](std::size_t s, std::size_t q, double sq) {
                           while (current < q) {
                             rows.offsets.push_back(rows.source.size());
                             ++current;
                           }
                           const auto& src = from[s].state;
                           const double trans = pi(mode_index(src.mode), mode_index(to[q].state.mode));
                           if (trans == 0.0) return;
                           const double k = models.survival(src) * trans *
                                            std::exp(motion_kernels[static_cast<std::size_t>(
                                                                        mode_index(to[q].state.mode))]
                                                         ->log_density_from_sq(sq));
                           rows.source.push_back(s);
                           rows.value.push_back(k);
                         });
      while (rows.offsets.size() < to.size() + 1) rows.offsets.push_back(rows.source.size());
    }

    for (std::size_t q = 0; q < to.size(); ++q) {
      double m = models.birth.components(label).empty() ? 0.0 : models.birth.density(to[q].state);
      for (std::size_t e = rows.offsets[q]; e < rows.offsets[q + 1]; ++e) m += from[rows.source[e]].weight * rows.value[e];
      mu[q] = m;
    }

    if (spawn.lambda > 0.0) {
      for (int src_class = 0; src_class < num_classes; ++src_class) {
        const double b = spawn.class_transition(src_class, c);
        if (b == 0.0) continue;
        const auto& sources = filtered.of(ClassLabel{src_class});
        visit_kernel_pairs(spawn_anchors[static_cast<std::size_t>(src_class)], std::span<const Particle>(to),
                           spawn_kernels, gate, [&](std::size_t u, std::size_t q, double sq) {
                             const auto& src = sources[u].state;
                             const int rq = mode_index(to[q].state.mode);
                             const double pm = spawn.mode_transition(mode_index(src.mode), rq);
                             if (pm == 0.0) return;
                             mu[q] += sources[u].weight * spawn.lambda * pm * b *
                                      std::exp(spawn_kernels[static_cast<std::size_t>(rq)]->log_density_from_sq(sq));
                           });
      }
    }

    std::vector<double> acc(from.size(), 0.0);
    for (std::size_t q = 0; q < to.size(); ++q) {
      const double wq = to[q].weight;
      if (wq == 0.0) continue;
      if (!(mu[q] > 0.0)) {
        std::ostringstream msg;
        msg << "smooth_step: zero predicted intensity at particle " << q << " of class " << c + 1 << " (scan "
            << smoothed_next.scan << ") carrying smoothed weight " << wq;
        throw std::runtime_error(msg.str());
      }
      const double scale = wq / mu[q];
      for (std::size_t e = rows.offsets[q]; e < rows.offsets[q + 1]; ++e) acc[rows.source[e]] += scale * rows.value[e];
    }

    auto& dst = out.of(label);
    dst.reserve(from.size());
    for (std::size_t s = 0; s < from.size(); ++s) {
      const double ps = models.survival(from[s].state);
      dst.push_back(Particle{from[s].weight * (acc[s] + 1.0 - ps), from[s].state});
    }
  }
  return out;
}

SmootherWindow::SmootherWindow(int lag) : lag_(lag) {
  if (lag < 0) throw std::invalid_argument("smoother lag must be >= 0");
}

void SmootherWindow::push(ParticleIntensity filtered) {
  if (!buffer_.empty() && filtered.scan != buffer_.back().scan + 1) {
    throw std::invalid_argument("SmootherWindow: scans must be contiguous");
  }
  buffer_.push_back(std::move(filtered));
  while (static_cast<int>(buffer_.size()) > lag_ + 1) buffer_.pop_front();
}

ParticleIntensity smooth_window(const SmootherWindow& window, const TargetModels& models, const GatingConfig& gate) {
  if (!window.full()) throw std::invalid_argument("smooth_window: window not full");
  const auto& buf = window.contents();
  ParticleIntensity smoothed = buf.back();
  for (int i = static_cast<int>(buf.size()) - 2; i >= 0; --i) {
    smoothed = smooth_step(buf[static_cast<std::size_t>(i)], smoothed, models, gate);
  }
  return smoothed;
}

ParticleIntensity resample_smoothed(const ParticleIntensity& smoothed, const ResampleConfig& config, Rng& rng) {
  return resample(smoothed, config, rng);
}

}  // namespace jdtc
