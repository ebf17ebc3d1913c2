#include <fstream>
#include <sstream>

#include "graspbridge/error.hpp"
#include "graspbridge/pipeline/dataset.hpp"
#include "json_util.hpp"

namespace graspbridge::pipeline {
namespace detail {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kInvalidInput, "failed writing " + path.string());
}

}  // namespace detail

namespace {

using detail::json;

json cloud_to_json(const geometry::OrientedCloud& c) {
  json pts = json::array(), nrm = json::array();
  for (const auto& p : c.cloud.points) pts.push_back({p.x(), p.y(), p.z()});
  for (const auto& n : c.normals) nrm.push_back({n.x(), n.y(), n.z()});
  return json{{"points", pts}, {"normals", nrm}};
}

geometry::OrientedCloud cloud_from_json(const json& j) {
  geometry::OrientedCloud c;
  for (const auto& p : j.at("points")) c.cloud.points.push_back(detail::vec_from_json(p, 3));
  for (const auto& n : j.at("normals")) c.normals.push_back(detail::vec_from_json(n, 3));
  if (c.normals.size() != c.cloud.size()) throw Error(ErrorCode::kFormat, "cloud needs one normal per point");
  return c;
}

json grasp_to_json(const costs::GraspAnnotation& g) {
  json j{{"hand_id", g.config.hand_id},
         {"position", detail::to_json_vec(g.config.base.position)},
         {"rot6d", detail::to_json_vec(g.config.base.rot6)},
         {"joints", detail::to_json_vec(g.config.joints)}};
  if (g.contact) j["contact"] = cloud_to_json(*g.contact);
  if (g.wrenches) j["wrenches"] = detail::to_json_rows(g.wrenches->vertices);
  if (g.jacobian) j["jacobian"] = detail::to_json_rows(*g.jacobian);
  if (g.manip) j["manip"] = detail::to_json_vec(*g.manip);
  return j;
}

costs::GraspAnnotation grasp_from_json(const json& j) {
  costs::GraspAnnotation g;
  g.config.hand_id = j.at("hand_id").get<std::string>();
  g.config.base.position = detail::vec_from_json(j.at("position"), 3);
  g.config.base.rot6 = detail::vec_from_json(j.at("rot6d"), 6);
  g.config.joints = detail::vec_from_json(j.at("joints"));
  if (j.contains("contact")) g.contact = cloud_from_json(j.at("contact"));
  if (j.contains("wrenches")) {
    wrench::WrenchHull hull;
    hull.vertices = detail::rows_from_json(j.at("wrenches"), 6);
    g.wrenches = hull;
  }
  if (j.contains("jacobian")) {
    const json& rows = j.at("jacobian");
    if (!rows.is_array() || rows.size() != 6) throw Error(ErrorCode::kFormat, "jacobian needs 6 rows");
    const auto cols = static_cast<Eigen::Index>(rows[0].size());
    g.jacobian = detail::rows_from_json(rows, cols);
  }
  if (j.contains("manip")) {
    g.manip = detail::vec_from_json(j.at("manip"), 6);
  } else if (g.jacobian) {
    g.manip = costs::max_effect(*g.jacobian);
  }
  return g;
}

}  // namespace

std::vector<geometry::GraspConfig> Dataset::configs() const {
  std::vector<geometry::GraspConfig> out;
  out.reserve(grasps.size());
  for (const auto& g : grasps) out.push_back(g.config);
  return out;
}

Dataset gen_dataset(const ToyHandSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "dataset needs at least one grasp");
  Dataset data;
  data.hand = spec;
  data.object = fibonacci_sphere(kObjectPoints);
  data.seed = seed;
  data.origin = "generated";
  data.grasps.reserve(n);
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    int tries = 0;
    for (;; ++tries) {
      if (tries >= kMaxGraspRetries) {
        throw Error(ErrorCode::kNumeric, "grasp " + std::to_string(i) + " found no contact after " +
                                             std::to_string(kMaxGraspRetries) + " draws");
      }
      costs::GraspAnnotation a = annotate(spec, data.object, sample_grasp(spec, rng));
      if (!a.contact->empty()) {
        data.grasps.push_back(std::move(a));
        break;
      }
    }
  }
  return data;
}

std::string dataset_to_json(const Dataset& data) {
  json grasps = json::array();
  for (const auto& g : data.grasps) grasps.push_back(grasp_to_json(g));
  json j{{"format", "graspbridge-dataset"},
         {"version", kDatasetFormatVersion},
         {"origin", data.origin},
         {"seed", data.seed},
         {"hand", detail::hand_to_json(data.hand)},
         {"object", cloud_to_json(data.object)},
         {"grasps", grasps}};
  if (!data.metadata.empty()) j["metadata"] = data.metadata;
  return j.dump();
}

Dataset dataset_from_json(const std::string& text, const std::string& origin_name) {
  const json j = detail::parse_json(text, origin_name);
  try {
    if (j.at("format").get<std::string>() != "graspbridge-dataset") {
      throw Error(ErrorCode::kFormat, origin_name + ": not a dataset file");
    }
    const int version = j.at("version").get<int>();
    if (version != kDatasetFormatVersion) {
      throw Error(ErrorCode::kFormat, origin_name + ": unsupported dataset version " + std::to_string(version));
    }
    Dataset d;
    d.origin = j.value("origin", std::string("generated"));
    d.seed = j.at("seed").get<std::uint64_t>();
    d.hand = detail::hand_from_json(j.at("hand"));
    d.object = cloud_from_json(j.at("object"));
    if (j.contains("metadata")) d.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& g : j.at("grasps")) {
      d.grasps.push_back(grasp_from_json(g));
      if (d.grasps.back().config.joints.size() != d.hand.dof()) {
        throw Error(ErrorCode::kFormat, origin_name + ": grasp joint count does not match the hand");
      }
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, origin_name + ": " + e.what());
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  detail::write_text(path, dataset_to_json(data));
}

Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(detail::read_text(path), path.string());
}

ToyHandSpec load_hand_spec(const std::filesystem::path& path) {
  return detail::hand_from_json(detail::parse_json(detail::read_text(path), path.string()));
}

void save_hand_spec(const std::filesystem::path& path, const ToyHandSpec& spec) {
  detail::write_text(path, detail::hand_to_json(spec).dump(2) + "\n");
}

}  // namespace graspbridge::pipeline
