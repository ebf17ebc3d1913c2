#include "graspbridge/pipeline/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "graspbridge/error.hpp"
#include "json_util.hpp"

namespace graspbridge::pipeline {
namespace {

using detail::json;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out_.append(b, sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void doubles(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(v(i));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, in_.data() + at_, sizeof(T));
    at_ += sizeof(T);
    return to_little(v);
  }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = in_.substr(at_, n);
    at_ += n;
    return s;
  }
  Eigen::VectorXd doubles(std::size_t n, const char* what) {
    need(n * sizeof(double), what);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = get<double>(what);
    return v;
  }
  std::size_t offset() const { return at_; }
  bool done() const { return at_ == in_.size(); }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kFormat, "checkpoint offset " + std::to_string(at_) + ": " + msg);
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (in_.size() - at_ < n) {
      fail(std::string("truncated while reading ") + what);
    }
  }
  const std::string& in_;
  std::size_t at_ = 0;
};

void write_net(Writer& w, const nets::NetParams& p, const nets::OptimState& st) {
  w.put<std::uint32_t>(p.activation == nets::Activation::kSiLU ? 0u : 1u);
  const auto sizes = p.sizes();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(sizes.size()));
  for (auto s : sizes) w.put<std::uint64_t>(static_cast<std::uint64_t>(s));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(st.step));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(p.parameter_count()));
  w.doubles(nets::flatten(p));
  w.doubles(st.m);
  w.doubles(st.v);
  w.doubles(st.ema);
}

void read_net(Reader& r, nets::NetParams& p, nets::OptimState& st, const nets::OptimConfig& cfg) {
  const auto tag = r.get<std::uint32_t>("activation tag");
  if (tag > 1) r.fail("unknown activation tag " + std::to_string(tag));
  const auto n_sizes = r.get<std::uint32_t>("layer count");
  if (n_sizes < 2 || n_sizes > 1024) r.fail("implausible layer count " + std::to_string(n_sizes));
  std::vector<Eigen::Index> sizes;
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    auto s = r.get<std::uint64_t>("layer size");
    if (s < 1 || s > (1u << 24)) r.fail("implausible layer size");
    sizes.push_back(static_cast<Eigen::Index>(s));
  }
  const auto step = r.get<std::uint64_t>("step count");
  const auto count = r.get<std::uint64_t>("parameter count");

  p = nets::NetParams{};
  p.activation = tag == 0 ? nets::Activation::kSiLU : nets::Activation::kIdentity;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    p.layers.push_back({Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]), Eigen::VectorXd::Zero(sizes[l + 1])});
  }
  if (static_cast<std::uint64_t>(p.parameter_count()) != count) r.fail("parameter count does not match layer sizes");
  nets::unflatten(r.doubles(count, "parameters"), p);
  st = nets::OptimState{};
  st.config = cfg;
  st.step = static_cast<long>(step);
  st.m = r.doubles(count, "first moments");
  st.v = r.doubles(count, "second moments");
  st.ema = r.doubles(count, "EMA parameters");
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  json meta{{"config", detail::parse_json(run_config_to_json(ckpt.config), "config")},
            {"source_hand", detail::hand_to_json(ckpt.source_hand)},
            {"target_hand", detail::hand_to_json(ckpt.target_hand)},
            {"latent_dim", ckpt.codec.dim},
            {"codec", "identity"},
            {"score_scale", std::string(sampler::to_string(ckpt.score_scale))},
            {"fingerprint", ckpt.fingerprint}};
  const std::string meta_text = meta.dump();

  Writer w;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_text.size()));
  w.bytes(meta_text.data(), meta_text.size());
  write_net(w, ckpt.flow_net, ckpt.flow_opt);
  write_net(w, ckpt.score_net, ckpt.score_opt);
  return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  const std::string magic = r.bytes(sizeof kCheckpointMagic, "magic");
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) r.fail("bad magic");
  const auto version = r.get<std::uint32_t>("format version");
  if (version != kCheckpointVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  const auto meta_len = r.get<std::uint32_t>("metadata length");
  const std::string meta_text = r.bytes(meta_len, "metadata");

  Checkpoint c;
  try {
    const json meta = detail::parse_json(meta_text, "checkpoint metadata");
    c.config = run_config_from_json(meta.at("config").dump());
    c.source_hand = detail::hand_from_json(meta.at("source_hand"));
    c.target_hand = detail::hand_from_json(meta.at("target_hand"));
    if (meta.at("codec").get<std::string>() != "identity") throw Error(ErrorCode::kFormat, "unknown latent codec");
    c.codec.dim = meta.at("latent_dim").get<Eigen::Index>();
    c.score_scale = sampler::parse_score_scale(meta.at("score_scale").get<std::string>());
    c.fingerprint = meta.at("fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("checkpoint metadata: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, std::string("checkpoint metadata: ") + e.what());
  }
  const nets::OptimConfig oc = c.config.optim_config();
  read_net(r, c.flow_net, c.flow_opt, oc);
  read_net(r, c.score_net, c.score_opt, oc);
  if (!r.done()) r.fail("trailing bytes after the score network");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  detail::write_text(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_text(path));
}

}  // namespace graspbridge::pipeline
