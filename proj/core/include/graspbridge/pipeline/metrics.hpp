#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graspbridge/costs.hpp"

namespace graspbridge::pipeline {

/// Mean over joint indices of the per-joint sample standard deviation (n - 1).
/// Throws kInvalidInput for fewer than 2 configs or mixed joint counts.
double diversity(const std::vector<geometry::GraspConfig>& configs);

struct PairMetrics {
  std::optional<double> iou;        // absent when either 6-D hull is empty or degenerate
  double d_pose = 0.0;
  std::optional<double> d_contact;  // absent when either contact map is empty
  double d_jac = 0.0;
  bool translated_contact = false;
};

struct AlignmentReport {
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<PairMetrics> pairs;

  std::optional<double> mean_iou;
  std::size_t iou_valid = 0;
  std::size_t iou_missing = 0;
  double mean_d_pose = 0.0;
  std::optional<double> mean_d_contact;
  std::size_t contact_valid = 0;
  double mean_d_jac = 0.0;
  double contact_rate = 0.0;  // fraction of translated grasps with a nonempty contact map
  std::optional<double> source_diversity;
  std::optional<double> translated_diversity;
};

inline constexpr int kMetricsSchemaVersion = 1;

/// Pair i compares source[i] with translated[i]; its IoU estimate uses seed
/// mix_seed(seed, i). Throws kShape when the lists differ in length and
/// kAnnotation when a required annotation is absent.
AlignmentReport eval_alignment(const std::vector<costs::GraspAnnotation>& source,
                               const std::vector<costs::GraspAnnotation>& translated, std::size_t n_samples,
                               std::uint64_t seed);

std::string metrics_to_json(const AlignmentReport& report);
AlignmentReport metrics_from_json(const std::string& text);
void save_metrics(const std::filesystem::path& path, const AlignmentReport& report);
AlignmentReport load_metrics(const std::filesystem::path& path);

/// One row per pair; missing values are empty cells.
std::string metrics_csv(const AlignmentReport& report);
/// Per-pair IoU bars with the mean as a horizontal rule.
std::string metrics_svg(const AlignmentReport& report);

}  // namespace graspbridge::pipeline
