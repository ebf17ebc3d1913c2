#include "graspbridge/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "graspbridge/error.hpp"
#include "graspbridge/parallel.hpp"
#include "graspbridge/random.hpp"
#include "graspbridge/wrench.hpp"
#include "json_util.hpp"

namespace graspbridge::pipeline {
namespace {

using detail::json;

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const costs::GraspAnnotation& require(const costs::GraspAnnotation& g, std::size_t i, const char* side) {
  if (!g.contact || !g.wrenches || !g.manip) {
    throw Error(ErrorCode::kAnnotation, std::string(side) + " grasp " + std::to_string(i) +
                                            " lacks contact, wrench or manipulability annotations");
  }
  return g;
}

std::optional<double> maybe_diversity(const std::vector<costs::GraspAnnotation>& gs) {
  if (gs.size() < 2) return std::nullopt;
  std::vector<geometry::GraspConfig> cs;
  for (const auto& g : gs) cs.push_back(g.config);
  return diversity(cs);
}

}  // namespace

double diversity(const std::vector<geometry::GraspConfig>& configs) {
  if (configs.size() < 2) throw Error(ErrorCode::kInvalidInput, "diversity needs at least 2 configs");
  const Eigen::Index dof = configs.front().joints.size();
  if (dof == 0) throw Error(ErrorCode::kInvalidInput, "diversity needs at least one joint");
  for (const auto& c : configs) {
    if (c.joints.size() != dof) throw Error(ErrorCode::kInvalidInput, "configs have different joint counts");
  }
  const double n = static_cast<double>(configs.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k < dof; ++k) {
    // Two passes on values shifted by the first sample; identical angles give exactly 0.
    const double shift = configs.front().joints(k);
    double mean = 0.0;
    for (const auto& c : configs) mean += c.joints(k) - shift;
    mean /= n;
    double ss = 0.0;
    for (const auto& c : configs) {
      const double d = (c.joints(k) - shift) - mean;
      ss += d * d;
    }
    total += std::sqrt(ss / (n - 1.0));
  }
  return total / static_cast<double>(dof);
}

AlignmentReport eval_alignment(const std::vector<costs::GraspAnnotation>& source,
                               const std::vector<costs::GraspAnnotation>& translated, std::size_t n_samples,
                               std::uint64_t seed) {
  if (source.size() != translated.size()) {
    throw Error(ErrorCode::kShape, "source has " + std::to_string(source.size()) + " grasps, translated has " +
                                       std::to_string(translated.size()));
  }
  if (n_samples == 0) throw Error(ErrorCode::kInvalidInput, "n_samples must be positive");
  for (std::size_t i = 0; i < source.size(); ++i) {
    require(source[i], i, "source");
    require(translated[i], i, "translated");
  }

  AlignmentReport r;
  r.n_samples = n_samples;
  r.seed = seed;
  r.pairs.resize(source.size());
  parallel_for(source.size(), [&](std::size_t i) {
    const auto& a = source[i];
    const auto& b = translated[i];
    PairMetrics& p = r.pairs[i];
    if (a.wrenches->size() > 0 && b.wrenches->size() > 0) {
      wrench::WrenchHull ha = *a.wrenches;
      wrench::WrenchHull hb = *b.wrenches;
      ha.dims = hb.dims = 6;
      try {
        p.iou = wrench::mc_hull_iou(ha, hb, n_samples, mix_seed(seed, i));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateHull) throw;
      }
    }
    p.d_pose = costs::d_pose(a.config, b.config);
    if (!a.contact->empty() && !b.contact->empty()) {
      p.d_contact = costs::d_contact(*a.contact, *b.contact);
    }
    p.d_jac = costs::d_jac(*a.manip, *b.manip);
    p.translated_contact = !b.contact->empty();
  });

  double iou_sum = 0.0, contact_sum = 0.0, pose_sum = 0.0, jac_sum = 0.0;
  std::size_t with_contact = 0;
  for (const auto& p : r.pairs) {
    if (p.iou) {
      iou_sum += *p.iou;
      ++r.iou_valid;
    } else {
      ++r.iou_missing;
    }
    if (p.d_contact) {
      contact_sum += *p.d_contact;
      ++r.contact_valid;
    }
    pose_sum += p.d_pose;
    jac_sum += p.d_jac;
    if (p.translated_contact) ++with_contact;
  }
  const double n = static_cast<double>(r.pairs.size());
  if (r.iou_valid > 0) r.mean_iou = iou_sum / static_cast<double>(r.iou_valid);
  if (r.contact_valid > 0) r.mean_d_contact = contact_sum / static_cast<double>(r.contact_valid);
  if (!r.pairs.empty()) {
    r.mean_d_pose = pose_sum / n;
    r.mean_d_jac = jac_sum / n;
    r.contact_rate = static_cast<double>(with_contact) / n;
  }
  r.source_diversity = maybe_diversity(source);
  r.translated_diversity = maybe_diversity(translated);
  return r;
}

std::string metrics_to_json(const AlignmentReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back(json{{"iou", optional_json(p.iou)},
                         {"d_pose", p.d_pose},
                         {"d_contact", optional_json(p.d_contact)},
                         {"d_jac", p.d_jac},
                         {"translated_contact", p.translated_contact}});
  }
  json j{{"schema", "graspbridge-metrics"},
         {"schema_version", kMetricsSchemaVersion},
         {"n_samples", r.n_samples},
         {"seed", r.seed},
         {"summary",
          {{"pairs", r.pairs.size()},
           {"mean_iou", optional_json(r.mean_iou)},
           {"iou_valid", r.iou_valid},
           {"iou_missing", r.iou_missing},
           {"mean_d_pose", r.mean_d_pose},
           {"mean_d_contact", optional_json(r.mean_d_contact)},
           {"contact_valid", r.contact_valid},
           {"mean_d_jac", r.mean_d_jac},
           {"contact_rate", r.contact_rate},
           {"source_diversity", optional_json(r.source_diversity)},
           {"translated_diversity", optional_json(r.translated_diversity)}}},
         {"pairs", pairs}};
  return j.dump(2) + "\n";
}

AlignmentReport metrics_from_json(const std::string& text) {
  const json j = detail::parse_json(text, "metrics");
  AlignmentReport r;
  try {
    if (j.at("schema").get<std::string>() != "graspbridge-metrics") throw Error(ErrorCode::kFormat, "not a metrics file");
    const int version = j.at("schema_version").get<int>();
    if (version != kMetricsSchemaVersion) {
      throw Error(ErrorCode::kFormat, "unsupported metrics schema version " + std::to_string(version));
    }
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const json& s = j.at("summary");
    r.mean_iou = optional_from<double>(s.at("mean_iou"));
    r.iou_valid = s.at("iou_valid").get<std::size_t>();
    r.iou_missing = s.at("iou_missing").get<std::size_t>();
    r.mean_d_pose = s.at("mean_d_pose").get<double>();
    r.mean_d_contact = optional_from<double>(s.at("mean_d_contact"));
    r.contact_valid = s.at("contact_valid").get<std::size_t>();
    r.mean_d_jac = s.at("mean_d_jac").get<double>();
    r.contact_rate = s.at("contact_rate").get<double>();
    r.source_diversity = optional_from<double>(s.at("source_diversity"));
    r.translated_diversity = optional_from<double>(s.at("translated_diversity"));
    for (const auto& p : j.at("pairs")) {
      r.pairs.push_back(PairMetrics{optional_from<double>(p.at("iou")), p.at("d_pose").get<double>(),
                                    optional_from<double>(p.at("d_contact")), p.at("d_jac").get<double>(),
                                    p.at("translated_contact").get<bool>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("metrics: ") + e.what());
  }
  return r;
}

void save_metrics(const std::filesystem::path& path, const AlignmentReport& report) {
  detail::write_text(path, metrics_to_json(report));
}

AlignmentReport load_metrics(const std::filesystem::path& path) { return metrics_from_json(detail::read_text(path)); }

std::string metrics_csv(const AlignmentReport& r) {
  std::ostringstream out;
  out << "pair,iou,d_pose,d_contact,d_jac,translated_contact\n";
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    const auto& p = r.pairs[i];
    out << i << ',' << (p.iou ? fmt(*p.iou) : "") << ',' << fmt(p.d_pose) << ','
        << (p.d_contact ? fmt(*p.d_contact) : "") << ',' << fmt(p.d_jac) << ',' << (p.translated_contact ? 1 : 0)
        << '\n';
  }
  return out.str();
}

std::string metrics_svg(const AlignmentReport& r) {
  const double width = 640.0, height = 320.0, margin = 40.0;
  const double plot_w = width - 2.0 * margin, plot_h = height - 2.0 * margin;
  const std::size_t n = std::max<std::size_t>(r.pairs.size(), 1);
  const double bar = plot_w / static_cast<double>(n);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">6-D wrench hull IoU per pair ("
      << r.iou_valid << " valid, " << r.iou_missing << " missing)</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin + plot_h << "\" x2=\"" << margin + plot_w << "\" y2=\""
      << margin + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << margin + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double y = margin + plot_h * (1.0 - tick / 4.0);
    out << "<text x=\"" << margin - 6 << "\" y=\"" << y + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << tick / 4.0 << "</text>\n";
  }
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    const auto& p = r.pairs[i];
    const double x = margin + bar * static_cast<double>(i);
    if (p.iou) {
      const double h = plot_h * std::clamp(*p.iou, 0.0, 1.0);
      out << "<rect x=\"" << x + 0.1 * bar << "\" y=\"" << margin + plot_h - h << "\" width=\"" << 0.8 * bar
          << "\" height=\"" << h << "\" fill=\"steelblue\"/>\n";
    } else {
      out << "<rect x=\"" << x + 0.1 * bar << "\" y=\"" << margin << "\" width=\"" << 0.8 * bar << "\" height=\""
          << plot_h << "\" fill=\"lightgray\" fill-opacity=\"0.4\"/>\n";
    }
  }
  if (r.mean_iou) {
    const double y = margin + plot_h * (1.0 - std::clamp(*r.mean_iou, 0.0, 1.0));
    out << "<line x1=\"" << margin << "\" y1=\"" << y << "\" x2=\"" << margin + plot_w << "\" y2=\"" << y
        << "\" stroke=\"crimson\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << margin + plot_w << "\" y=\"" << y - 4
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\" fill=\"crimson\">mean " << fmt(*r.mean_iou)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace graspbridge::pipeline
