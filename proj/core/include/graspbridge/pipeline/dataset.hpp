#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "graspbridge/costs.hpp"
#include "graspbridge/pipeline/toy_hand.hpp"

namespace graspbridge::pipeline {

struct Dataset {
  ToyHandSpec hand;
  geometry::OrientedCloud object;
  std::vector<costs::GraspAnnotation> grasps;
  std::uint64_t seed = 0;
  // "generated" sets guarantee nonempty contact maps; "translated" sets do not.
  std::string origin = "generated";
  // Free-form provenance, e.g. the sampler settings of a translation.
  std::map<std::string, std::string> metadata;

  std::vector<geometry::GraspConfig> configs() const;
};

inline constexpr int kDatasetFormatVersion = 1;

/// n grasps on the Fibonacci unit sphere. Grasps without any contact are
/// redrawn, up to kMaxGraspRetries per grasp (then kNumeric).
Dataset gen_dataset(const ToyHandSpec& spec, std::size_t n, std::uint64_t seed);

void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

std::string dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const std::string& text, const std::string& origin_name = "<memory>");

ToyHandSpec load_hand_spec(const std::filesystem::path& path);
void save_hand_spec(const std::filesystem::path& path, const ToyHandSpec& spec);

}  // namespace graspbridge::pipeline
