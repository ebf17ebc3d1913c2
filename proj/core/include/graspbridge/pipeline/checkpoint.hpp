#pragma once

#include <filesystem>
#include <string>

#include "graspbridge/nets.hpp"
#include "graspbridge/pipeline/codec.hpp"
#include "graspbridge/pipeline/run_config.hpp"
#include "graspbridge/pipeline/toy_hand.hpp"
#include "graspbridge/sampler.hpp"

namespace graspbridge::pipeline {

/// Both regressors with their optimizer state and everything translation
/// needs to interpret them. Byte layout: docs/checkpoint_format.md.
struct Checkpoint {
  RunConfig config;
  ToyHandSpec source_hand;
  ToyHandSpec target_hand;
  LatentCodec codec;
  sampler::ScoreScale score_scale = sampler::ScoreScale::kRescaled;
  std::string fingerprint;

  nets::NetParams flow_net;
  nets::NetParams score_net;
  nets::OptimState flow_opt;
  nets::OptimState score_opt;
};

inline constexpr char kCheckpointMagic[8] = {'G', 'B', 'R', 'G', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws kFormat (with the byte offset) on bad magic, unknown version,
/// truncation or inconsistent sizes.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace graspbridge::pipeline
