#include "gaitforge/model/dynamics.hpp"

#include "gaitforge/math/linalg.hpp"
#include "gaitforge/model/planar_dyn.hpp"

namespace gaitforge::model {

namespace {
void check_state(const RobotModel& model, const State& s) {
  if (s.q.size() != model.nq() || s.v.size() != model.nq())
    throw ModelError("state dimension does not match model");
}
}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> dynamics_terms(const RobotModel& model,
                                                           const State& state) {
  check_state(model, state);
  const auto kin = forward_kinematics<double>(model, state.q);
  Eigen::MatrixXd M = mass_matrix<double>(model, kin);
  Eigen::VectorXd H = inverse_dynamics<double>(model, kin, state.q, state.v,
                                               Eigen::VectorXd::Zero(model.nq()));
  return {std::move(M), std::move(H)};
}

Eigen::VectorXd inverse_dynamics_oracle(const RobotModel& model, const State& state,
                                        const Eigen::VectorXd& a) {
  check_state(model, state);
  if (a.size() != model.nq()) throw ModelError("acceleration dimension mismatch");
  const auto kin = forward_kinematics<double>(model, state.q);
  return inverse_dynamics<double>(model, kin, state.q, state.v, a);
}

FrameKinematics frame_kinematics(const RobotModel& model, const State& state, int frame) {
  check_state(model, state);
  if (frame < 0 || frame >= static_cast<int>(model.contacts.size()))
    throw ModelError("unknown contact frame index");
  const auto kin = forward_kinematics<double>(model, state.q);
  const auto fk = frame_kinematics<double>(model, kin, state.q, state.v, frame);
  return {fk.position, fk.velocity, fk.jacobian, fk.jdot_v};
}

FrameKinematics frame_kinematics(const RobotModel& model, const State& state,
                                 const std::string& frame) {
  return frame_kinematics(model, state, model.contact_index(frame));
}

ConstrainedAccel constrained_dynamics(const RobotModel& model, const State& state,
                                      const Eigen::VectorXd& u, const ContactSet& contacts) {
  check_state(model, state);
  if (u.size() != model.nu()) throw ModelError("input dimension mismatch");
  Eigen::VectorXd a, F;
  constrained_dynamics<double>(model, state.q, state.v, u, contacts, &a, &F);
  return {std::move(a), std::move(F)};
}

State impact_map(const RobotModel& model, const State& state, const ContactSet& contacts) {
  check_state(model, state);
  State out = state;
  out.v = impact_velocity<double>(model, state.q, state.v, contacts);
  return out;
}

Eigen::VectorXd impact_projection(const Eigen::MatrixXd& M, const Eigen::MatrixXd& J,
                                  const Eigen::VectorXd& v) {
  const Eigen::MatrixXd MinvJt = math::solve_dense<double>(M, J.transpose());
  const Eigen::MatrixXd A = J * MinvJt;
  if (math::rcond_spd(A) < 1e-10) throw ModelError("rank-deficient contact Jacobian stack");
  Eigen::MatrixXd Jv = J * v;
  return v - MinvJt * math::solve_dense<double>(A, Jv).col(0);
}

State mirror_state(const RobotModel& model, const State& state) {
  check_state(model, state);
  State out = state;
  out.q = model.apply_symmetry(state.q);
  out.v = model.apply_symmetry(state.v);
  out.q[0] = 0.0;
  return out;
}

double kinetic_energy(const RobotModel& model, const State& state) {
  check_state(model, state);
  const auto kin = forward_kinematics<double>(model, state.q);
  const Eigen::MatrixXd M = mass_matrix<double>(model, kin);
  return 0.5 * state.v.dot(M * state.v);
}

double potential_energy(const RobotModel& model, const State& state) {
  check_state(model, state);
  const auto kin = forward_kinematics<double>(model, state.q);
  double u = 0.0;
  for (size_t k = 0; k < model.bodies.size(); ++k) {
    u -= model.bodies[k].mass * model.gravity.dot(kin.com[k]);
  }
  return u;
}

double total_mass(const RobotModel& model) {
  double m = 0.0;
  for (const Body& b : model.bodies) m += b.mass;
  return m;
}

Eigen::Vector2d center_of_mass(const RobotModel& model, const State& state) {
  check_state(model, state);
  const auto kin = forward_kinematics<double>(model, state.q);
  Eigen::Vector2d com = Eigen::Vector2d::Zero();
  for (size_t k = 0; k < model.bodies.size(); ++k) com += model.bodies[k].mass * kin.com[k];
  return com / total_mass(model);
}

}  // namespace gaitforge::model
