#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graspbridge/pipeline/checkpoint.hpp"
#include "graspbridge/pipeline/dataset.hpp"
#include "graspbridge/sampler.hpp"

namespace graspbridge::pipeline {

enum class TranslateMethod { kEulerMaruyama, kOdeEuler, kOdeRK4 };
/// "em", "euler" or "rk4".
TranslateMethod parse_translate_method(std::string_view s);

struct TranslateOptions {
  int n_steps = 100;
  // Independent draws per source config; outputs are grouped by input.
  int samples_per_input = 1;
  std::uint64_t seed = 0;
  TranslateMethod method = TranslateMethod::kEulerMaruyama;
  // When set, must match the convention recorded in the checkpoint (kConfig otherwise).
  std::optional<sampler::ScoreScale> score_scale;
  // Use the EMA shadow weights (the default) or the raw weights.
  bool use_ema = true;
};

/// Encodes each source config, integrates the learned bridge and decodes to
/// the target hand. Draw k of input i always uses noise stream
/// i * samples_per_input + k, so outputs do not depend on batch composition.
std::vector<geometry::GraspConfig> translate(const Checkpoint& ckpt, const std::vector<geometry::GraspConfig>& source,
                                             const TranslateOptions& options = {});

/// translate() followed by annotation with the checkpoint's target hand on
/// the source object. Grasps without contact are kept with an empty map.
Dataset translate_dataset(const Checkpoint& ckpt, const Dataset& source, const TranslateOptions& options = {});

}  // namespace graspbridge::pipeline
