#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "graspbridge/error.hpp"
#include "graspbridge/pipeline/toy_hand.hpp"

namespace graspbridge::pipeline::detail {

using nlohmann::json;

inline json to_json_vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::VectorXd vec_from_json(const json& a, Eigen::Index expected = -1) {
  if (!a.is_array()) throw Error(ErrorCode::kFormat, "expected a numeric array");
  if (expected >= 0 && static_cast<Eigen::Index>(a.size()) != expected) {
    throw Error(ErrorCode::kFormat, "expected an array of length " + std::to_string(expected));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw Error(ErrorCode::kFormat, "expected a number");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

/// Rows of M as nested arrays.
inline json to_json_rows(const Eigen::MatrixXd& M) {
  json a = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) a.push_back(to_json_vec(M.row(r).transpose()));
  return a;
}

inline Eigen::MatrixXd rows_from_json(const json& a, Eigen::Index cols) {
  if (!a.is_array()) throw Error(ErrorCode::kFormat, "expected an array of rows");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(a.size()), cols);
  for (std::size_t r = 0; r < a.size(); ++r) M.row(static_cast<Eigen::Index>(r)) = vec_from_json(a[r], cols).transpose();
  return M;
}

inline json hand_to_json(const ToyHandSpec& h) {
  return json{{"hand_id", h.hand_id},
              {"fingers", h.fingers},
              {"finger_length", h.finger_length},
              {"azimuths", h.azimuths},
              {"joint_range", {h.joint_min, h.joint_max}}};
}

inline ToyHandSpec hand_from_json(const json& j) {
  try {
    ToyHandSpec h = ToyHandSpec::evenly_spaced(j.at("hand_id").get<std::string>(), j.at("fingers").get<int>(),
                                               j.at("finger_length").get<double>());
    if (j.contains("azimuths")) h.azimuths = j.at("azimuths").get<std::vector<double>>();
    if (j.contains("joint_range")) {
      auto r = j.at("joint_range").get<std::vector<double>>();
      if (r.size() != 2) throw Error(ErrorCode::kFormat, "joint_range needs two entries");
      h.joint_min = r[0];
      h.joint_max = r[1];
    }
    h.validate();
    return h;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("hand spec: ") + e.what());
  }
}

inline json parse_json(const std::string& text, const std::string& name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, name + ": " + e.what());
  }
}

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace graspbridge::pipeline::detail
