#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "graspbridge/bridge.hpp"
#include "graspbridge/nets.hpp"
#include "graspbridge/random.hpp"

namespace graspbridge::sampler {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// f(t, x) for one state.
using VectorField = std::function<VectorXd(double, const VectorXd&)>;
/// f(t, X) applied column-wise to a batch of states.
using BatchField = std::function<MatrixXd(double, const MatrixXd&)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;

  const VectorXd& endpoint() const { return states.back(); }
};

enum class OdeMethod { kEuler, kRK4 };
OdeMethod parse_ode_method(std::string_view s);

/// How the score network output enters the drift: drift = v + kappa * s.
/// kRescaled (kappa = 1): the network already approximates (sigma^2/2) grad log p.
/// kUnitVariance (kappa = sigma^2/2): the network approximates grad log p itself.
enum class ScoreScale { kRescaled, kUnitVariance };
std::string_view to_string(ScoreScale s);
ScoreScale parse_score_scale(std::string_view s);
ScoreScale score_scale_for(bridge::LambdaVariant variant);
double score_weight(ScoreScale scale, double sigma);

/// n_steps + 1 uniformly spaced times from t_min to 1 - t_min.
std::vector<double> time_grid(int n_steps, double t_min = bridge::kDefaultTMin);

/// Euler-Maruyama: x <- x + (v + kappa s) dt + sigma sqrt(dt) xi.
/// Throws kDivergence with the step index if a state stops being finite.
Trajectory em_integrate(const VectorField& v, const VectorField& s, const VectorXd& x0, double sigma, int n_steps,
                        Rng& rng, double t_min = bridge::kDefaultTMin, double kappa = 1.0);

/// Deterministic integration of v alone on the same grid.
Trajectory ode_integrate(const VectorField& v, const VectorXd& x0, int n_steps, OdeMethod method,
                         double t_min = bridge::kDefaultTMin);

/// Batched Euler-Maruyama returning endpoints only. Column j draws its noise
/// from make_rng(seed, j), so results do not depend on batch composition.
MatrixXd em_endpoints(const BatchField& v, const BatchField& s, const MatrixXd& x0, double sigma, int n_steps,
                      std::uint64_t seed, double t_min = bridge::kDefaultTMin, double kappa = 1.0);

VectorField net_field(const nets::NetParams& params, VectorXd context = VectorXd());
BatchField net_batch_field(const nets::NetParams& params, VectorXd context = VectorXd());
VectorField zero_field();

}  // namespace graspbridge::sampler
