#include "graspbridge/sampler.hpp"

#include <cmath>
#include <string>

#include "graspbridge/error.hpp"

namespace graspbridge::sampler {
namespace {

void check_steps(int n_steps, double t_min) {
  if (n_steps < 1) throw Error(ErrorCode::kInvalidInput, "need at least one integration step");
  if (!(t_min >= 0.0 && t_min < 0.5)) throw Error(ErrorCode::kInvalidInput, "t_min must lie in [0, 0.5)");
}

void check_finite(const VectorXd& x, int step) {
  if (!x.allFinite()) throw Error(ErrorCode::kDivergence, "state diverged at step " + std::to_string(step));
}

}  // namespace

OdeMethod parse_ode_method(std::string_view s) {
  if (s == "euler") return OdeMethod::kEuler;
  if (s == "rk4") return OdeMethod::kRK4;
  throw Error(ErrorCode::kInvalidInput, "unknown ODE method '" + std::string(s) + "'");
}

std::string_view to_string(ScoreScale s) { return s == ScoreScale::kRescaled ? "rescaled" : "unitvar"; }

ScoreScale parse_score_scale(std::string_view s) {
  if (s == "rescaled") return ScoreScale::kRescaled;
  if (s == "unitvar" || s == "unit-variance") return ScoreScale::kUnitVariance;
  throw Error(ErrorCode::kInvalidInput, "unknown score scale '" + std::string(s) + "'");
}

ScoreScale score_scale_for(bridge::LambdaVariant variant) {
  return variant == bridge::LambdaVariant::kRescaled ? ScoreScale::kRescaled : ScoreScale::kUnitVariance;
}

double score_weight(ScoreScale scale, double sigma) {
  return scale == ScoreScale::kRescaled ? 1.0 : 0.5 * sigma * sigma;
}

std::vector<double> time_grid(int n_steps, double t_min) {
  check_steps(n_steps, t_min);
  std::vector<double> ts(static_cast<std::size_t>(n_steps) + 1);
  const double span = 1.0 - 2.0 * t_min;
  for (int k = 0; k <= n_steps; ++k) {
    ts[static_cast<std::size_t>(k)] = t_min + span * static_cast<double>(k) / static_cast<double>(n_steps);
  }
  return ts;
}

Trajectory em_integrate(const VectorField& v, const VectorField& s, const VectorXd& x0, double sigma, int n_steps,
                        Rng& rng, double t_min, double kappa) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidInput, "sigma must be non-negative");
  Trajectory traj;
  traj.times = time_grid(n_steps, t_min);
  traj.states.reserve(traj.times.size());
  traj.states.push_back(x0);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd x = x0;
  VectorXd xi(x0.size());
  for (int k = 0; k < n_steps; ++k) {
    const double t = traj.times[static_cast<std::size_t>(k)];
    const double dt = traj.times[static_cast<std::size_t>(k) + 1] - t;
    VectorXd drift = v(t, x) + kappa * s(t, x);
    x += drift * dt;
    if (sigma > 0.0) {
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
      x += (sigma * std::sqrt(dt)) * xi;
    }
    check_finite(x, k + 1);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory ode_integrate(const VectorField& v, const VectorXd& x0, int n_steps, OdeMethod method, double t_min) {
  Trajectory traj;
  traj.times = time_grid(n_steps, t_min);
  traj.states.reserve(traj.times.size());
  traj.states.push_back(x0);
  VectorXd x = x0;
  for (int k = 0; k < n_steps; ++k) {
    const double t = traj.times[static_cast<std::size_t>(k)];
    const double dt = traj.times[static_cast<std::size_t>(k) + 1] - t;
    if (method == OdeMethod::kEuler) {
      x += v(t, x) * dt;
    } else {
      const VectorXd k1 = v(t, x);
      const VectorXd k2 = v(t + 0.5 * dt, x + 0.5 * dt * k1);
      const VectorXd k3 = v(t + 0.5 * dt, x + 0.5 * dt * k2);
      const VectorXd k4 = v(t + dt, x + dt * k3);
      x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check_finite(x, k + 1);
    traj.states.push_back(x);
  }
  return traj;
}

MatrixXd em_endpoints(const BatchField& v, const BatchField& s, const MatrixXd& x0, double sigma, int n_steps,
                      std::uint64_t seed, double t_min, double kappa) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidInput, "sigma must be non-negative");
  const std::vector<double> ts = time_grid(n_steps, t_min);
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(x0.cols()));
  for (Eigen::Index j = 0; j < x0.cols(); ++j) streams.push_back(make_rng(seed, static_cast<std::uint64_t>(j)));
  // One distribution per stream: libstdc++ caches a spare normal draw.
  std::vector<std::normal_distribution<double>> normals(streams.size());
  MatrixXd x = x0;
  for (int k = 0; k < n_steps; ++k) {
    const double t = ts[static_cast<std::size_t>(k)];
    const double dt = ts[static_cast<std::size_t>(k) + 1] - t;
    MatrixXd drift = v(t, x) + kappa * s(t, x);
    x += drift * dt;
    if (sigma > 0.0) {
      const double scale = sigma * std::sqrt(dt);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        auto& rng = streams[static_cast<std::size_t>(j)];
        auto& normal = normals[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) += scale * normal(rng);
      }
    }
    if (!x.allFinite()) throw Error(ErrorCode::kDivergence, "state diverged at step " + std::to_string(k + 1));
  }
  return x;
}

VectorField net_field(const nets::NetParams& params, VectorXd context) {
  return [params, context = std::move(context)](double t, const VectorXd& x) {
    return nets::net_forward(params, x, t, context);
  };
}

BatchField net_batch_field(const nets::NetParams& params, VectorXd context) {
  return [params, context = std::move(context)](double t, const MatrixXd& x) {
    std::vector<double> ts(static_cast<std::size_t>(x.cols()), t);
    if (context.size() == 0) return nets::forward_batch(params, nets::assemble_inputs(x, ts));
    MatrixXd ctx = context.replicate(1, x.cols());
    return nets::forward_batch(params, nets::assemble_inputs(x, ts, &ctx));
  };
}

VectorField zero_field() {
  return [](double, const VectorXd& x) { return VectorXd::Zero(x.size()); };
}

}  // namespace graspbridge::sampler
