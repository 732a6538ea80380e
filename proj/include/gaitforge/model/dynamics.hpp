#pragma once

#include <Eigen/Core>
#include <utility>

#include "gaitforge/model/model.hpp"

namespace gaitforge::model {

// M(q) via the composite-rigid-body algorithm, H(q, v) via recursive
// Newton-Euler with zero acceleration.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> dynamics_terms(const RobotModel& model,
                                                           const State& state);

// Full inverse dynamics ID(q, v, a); the independent oracle for M a + H.
Eigen::VectorXd inverse_dynamics_oracle(const RobotModel& model, const State& state,
                                        const Eigen::VectorXd& a);

struct FrameKinematics {
  Eigen::Vector2d position;
  Eigen::Vector2d velocity;
  Eigen::MatrixXd jacobian;  // 2 x n
  Eigen::Vector2d jdot_v;
};

FrameKinematics frame_kinematics(const RobotModel& model, const State& state, int frame);
FrameKinematics frame_kinematics(const RobotModel& model, const State& state,
                                 const std::string& frame);

struct ConstrainedAccel {
  Eigen::VectorXd a;      // generalized acceleration
  Eigen::VectorXd force;  // stacked contact wrench, dimension contacts.dim()
};

ConstrainedAccel constrained_dynamics(const RobotModel& model, const State& state,
                                      const Eigen::VectorXd& u, const ContactSet& contacts);

State impact_map(const RobotModel& model, const State& state, const ContactSet& contacts);

// The bare velocity projection v+ = (I - Minv J^T (J Minv J^T)^-1 J) v for a
// caller-supplied mass matrix and constraint Jacobian.
Eigen::VectorXd impact_projection(const Eigen::MatrixXd& M, const Eigen::MatrixXd& J,
                                  const Eigen::VectorXd& v);

// Swaps paired coordinates (with declared signs) in q and v and zeroes the
// horizontal base position so mirrored states compare translation-free.
State mirror_state(const RobotModel& model, const State& state);

double kinetic_energy(const RobotModel& model, const State& state);

// Gravitational potential relative to the world origin, -sum m_i g . r_i.
double potential_energy(const RobotModel& model, const State& state);

double total_mass(const RobotModel& model);

// World COM position of the whole mechanism.
Eigen::Vector2d center_of_mass(const RobotModel& model, const State& state);

}  // namespace gaitforge::model
