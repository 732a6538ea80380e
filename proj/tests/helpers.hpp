#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "gaitforge/model/model.hpp"
#include "gaitforge/util/util.hpp"

namespace test {

inline std::string asset_path(const std::string& rel) {
  return std::string(GAITFORGE_ASSET_DIR) + "/" + rel;
}

inline std::string biped_path() { return asset_path("models/fivelink_biped.json"); }

inline gaitforge::model::RobotModel load_biped() {
  return gaitforge::model::load_model(biped_path());
}

// Central finite-difference Jacobian of a vector-valued function.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// A state with joints strictly inside limits and bounded velocities.
inline gaitforge::model::State random_state(const gaitforge::model::RobotModel& model,
                                            gaitforge::util::Rng& rng) {
  gaitforge::model::State s;
  const int n = model.nq();
  s.q.resize(n);
  s.v.resize(n);
  const Eigen::VectorXd lo = model.lower_joint_limits();
  const Eigen::VectorXd hi = model.upper_joint_limits();
  s.q[0] = rng.uniform(-1.0, 1.0);
  s.q[1] = rng.uniform(0.4, 1.0);
  s.q[2] = rng.uniform(-0.5, 0.5);
  for (int i = 3; i < n; ++i) {
    const double l = std::max(lo[i], -3.0), u = std::min(hi[i], 3.0);
    s.q[i] = rng.uniform(l + 0.05 * (u - l), u - 0.05 * (u - l));
  }
  for (int i = 0; i < n; ++i) s.v[i] = rng.uniform(-5.0, 5.0);
  return s;
}

}  // namespace test
