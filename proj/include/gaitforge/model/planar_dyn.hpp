#pragma once

// Planar rigid-body dynamics kernels, templated on the scalar type so the
// same code paths produce values (double) and forward-mode directional
// derivatives (math::Dual).
//
// All spatial quantities use planar coordinates (angular, linear_x, linear_z)
// referenced at the world origin, which removes every frame transform from
// the composite-rigid-body and Newton-Euler recursions.

#include <Eigen/Core>
#include <vector>

#include "gaitforge/math/linalg.hpp"
#include "gaitforge/model/model.hpp"

namespace gaitforge::model {

template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec2T = Eigen::Matrix<S, 2, 1>;
template <typename S>
using Vec3T = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Mat3T = Eigen::Matrix<S, 3, 3>;

template <typename S>
Vec2T<S> rot90(const Vec2T<S>& p) {  // S * p, 90 degree CCW rotation
  return Vec2T<S>(-p[1], p[0]);
}

template <typename S>
Vec2T<S> rotate(const S& angle, const Vec2T<S>& p) {
  using std::cos;
  using std::sin;
  const S c = cos(angle), s = sin(angle);
  return Vec2T<S>(c * p[0] - s * p[1], s * p[0] + c * p[1]);
}

// Frame kinematics of every body, evaluated once per dynamics call.
template <typename S>
struct KinCache {
  std::vector<S> angle;          // absolute body angle
  std::vector<Vec2T<S>> origin;  // world position of the body frame origin
  std::vector<Vec2T<S>> com;     // world COM position
};

template <typename S>
KinCache<S> forward_kinematics(const RobotModel& model, const VecX<S>& q) {
  const int nb = static_cast<int>(model.bodies.size());
  KinCache<S> kin;
  kin.angle.resize(nb);
  kin.origin.resize(nb);
  kin.com.resize(nb);
  kin.angle[0] = q[2];
  kin.origin[0] = Vec2T<S>(q[0], q[1]);
  for (int k = 1; k < nb; ++k) {
    const Body& b = model.bodies[k];
    const int p = b.parent;
    kin.origin[k] = kin.origin[p] + rotate(kin.angle[p], Vec2T<S>(S(b.joint.anchor[0]), S(b.joint.anchor[1])));
    kin.angle[k] = kin.angle[p] + q[b.coord];
  }
  for (int k = 0; k < nb; ++k) {
    const Body& b = model.bodies[k];
    kin.com[k] = kin.origin[k] + rotate(kin.angle[k], Vec2T<S>(S(b.com[0]), S(b.com[1])));
  }
  return kin;
}

// Motion subspace of coordinate c as a planar spatial vector at the world
// origin. The revolute columns depend on the current anchor position.
template <typename S>
Vec3T<S> subspace_column(const RobotModel& model, const KinCache<S>& kin, int c) {
  if (c == 0) return Vec3T<S>(S(0), S(1), S(0));
  if (c == 1) return Vec3T<S>(S(0), S(0), S(1));
  const Vec2T<S>& a = (c == 2) ? kin.origin[0] : kin.origin[c - 2];
  return Vec3T<S>(S(1), a[1], -a[0]);  // (1, -S*a)
}

// Spatial inertia of body k about the world origin.
template <typename S>
Mat3T<S> spatial_inertia(const RobotModel& model, const KinCache<S>& kin, int k) {
  const Body& b = model.bodies[k];
  const Vec2T<S>& r = kin.com[k];
  const S m = S(b.mass);
  Mat3T<S> I;
  I(0, 0) = S(b.inertia) + m * (r[0] * r[0] + r[1] * r[1]);
  I(0, 1) = -m * r[1];
  I(0, 2) = m * r[0];
  I(1, 0) = I(0, 1);
  I(2, 0) = I(0, 2);
  I(1, 1) = m;
  I(1, 2) = S(0);
  I(2, 1) = S(0);
  I(2, 2) = m;
  return I;
}

// Composite-rigid-body mass matrix.
template <typename S>
MatX<S> mass_matrix(const RobotModel& model, const KinCache<S>& kin) {
  const int nb = static_cast<int>(model.bodies.size());
  const int n = model.nq();
  std::vector<Mat3T<S>> IC(nb);
  for (int k = 0; k < nb; ++k) IC[k] = spatial_inertia(model, kin, k);
  for (int k = nb - 1; k >= 1; --k) IC[model.bodies[k].parent] += IC[k];

  MatX<S> M = MatX<S>::Zero(n, n);
  auto coords_of = [&](int body) {
    return body == 0 ? std::vector<int>{0, 1, 2} : std::vector<int>{model.bodies[body].coord};
  };
  for (int k = 0; k < nb; ++k) {
    for (int c : coords_of(k)) {
      const Vec3T<S> F = IC[k] * subspace_column(model, kin, c);
      M(c, c) = subspace_column(model, kin, c).dot(F);
      int j = k;
      while (j != 0) {
        j = model.bodies[j].parent;
        for (int c2 : coords_of(j)) {
          const S mij = subspace_column(model, kin, c2).dot(F);
          M(c, c2) = mij;
          M(c2, c) = mij;
        }
      }
    }
  }
  return M;
}

// Recursive Newton-Euler inverse dynamics: returns the generalized force
// required to realize acceleration a at (q, v), gravity included. H(q, v)
// is inverse_dynamics with a = 0.
template <typename S>
VecX<S> inverse_dynamics(const RobotModel& model, const KinCache<S>& kin, const VecX<S>& q,
                         const VecX<S>& v, const VecX<S>& a) {
  const int nb = static_cast<int>(model.bodies.size());
  const int n = model.nq();
  std::vector<Vec3T<S>> V(nb), A(nb);

  // Base: subspace columns for px, pz are constant; the rotational column
  // has time derivative (0, -S*pdot_base).
  const Vec2T<S> pb_dot(v[0], v[1]);
  V[0] = subspace_column(model, kin, 0) * v[0] + subspace_column(model, kin, 1) * v[1] +
         subspace_column(model, kin, 2) * v[2];
  A[0] = subspace_column(model, kin, 0) * a[0] + subspace_column(model, kin, 1) * a[1] +
         subspace_column(model, kin, 2) * a[2] + Vec3T<S>(S(0), pb_dot[1], -pb_dot[0]) * v[2];

  for (int k = 1; k < nb; ++k) {
    const Body& b = model.bodies[k];
    const int p = b.parent;
    const int c = b.coord;
    const Vec2T<S>& anchor = kin.origin[k];
    // Velocity of the anchor material point (carried by the parent body).
    const Vec2T<S> a_dot = Vec2T<S>(V[p][1], V[p][2]) + rot90<S>(anchor) * V[p][0];
    V[k] = V[p] + subspace_column(model, kin, c) * v[c];
    A[k] = A[p] + subspace_column(model, kin, c) * a[c] + Vec3T<S>(S(0), a_dot[1], -a_dot[0]) * v[c];
  }

  std::vector<Vec3T<S>> f(nb);
  for (int k = 0; k < nb; ++k) {
    const Body& b = model.bodies[k];
    const S m = S(b.mass);
    const Vec2T<S>& r = kin.com[k];
    const Vec2T<S> r_dot = Vec2T<S>(V[k][1], V[k][2]) + rot90<S>(r) * V[k][0];
    const Mat3T<S> I = spatial_inertia(model, kin, k);
    Mat3T<S> Idot = Mat3T<S>::Zero();
    Idot(0, 0) = S(2) * m * (r[0] * r_dot[0] + r[1] * r_dot[1]);
    Idot(0, 1) = -m * r_dot[1];
    Idot(0, 2) = m * r_dot[0];
    Idot(1, 0) = Idot(0, 1);
    Idot(2, 0) = Idot(0, 2);
    const Vec3T<S> gravity(m * (r[0] * S(model.gravity[1]) - r[1] * S(model.gravity[0])),
                           m * S(model.gravity[0]), m * S(model.gravity[1]));
    f[k] = I * A[k] + Idot * V[k] - gravity;
  }
  for (int k = nb - 1; k >= 1; --k) f[model.bodies[k].parent] += f[k];

  VecX<S> tau = VecX<S>::Zero(n);
  for (int c = 0; c < 3; ++c) tau[c] = subspace_column(model, kin, c).dot(f[0]);
  for (int k = 1; k < nb; ++k) {
    const int c = model.bodies[k].coord;
    tau[c] = subspace_column(model, kin, c).dot(f[k]);
  }
  return tau;
}

template <typename S>
struct FrameKin {
  Vec2T<S> position;
  Vec2T<S> velocity;
  MatX<S> jacobian;   // 2 x n
  Vec2T<S> jdot_v;    // d(J v)/dt at fixed v
};

template <typename S>
FrameKin<S> frame_kinematics(const RobotModel& model, const KinCache<S>& kin, const VecX<S>& q,
                             const VecX<S>& v, int frame) {
  const ContactFrame& cf = model.contacts.at(frame);
  const int n = model.nq();
  FrameKin<S> out;
  out.position = kin.origin[cf.body] + rotate(kin.angle[cf.body], Vec2T<S>(S(cf.offset[0]), S(cf.offset[1])));

  out.jacobian = MatX<S>::Zero(2, n);
  out.jacobian(0, 0) = S(1);
  out.jacobian(1, 1) = S(1);
  {
    const Vec2T<S> col = rot90<S>(Vec2T<S>(out.position - kin.origin[0]));
    out.jacobian(0, 2) = col[0];
    out.jacobian(1, 2) = col[1];
  }
  for (int k = cf.body; k != 0; k = model.bodies[k].parent) {
    const int c = model.bodies[k].coord;
    const Vec2T<S> col = rot90<S>(Vec2T<S>(out.position - kin.origin[k]));
    out.jacobian(0, c) = col[0];
    out.jacobian(1, c) = col[1];
  }
  out.velocity = out.jacobian * v;

  // Point acceleration at zero generalized acceleration.
  const int nb = static_cast<int>(model.bodies.size());
  std::vector<Vec3T<S>> V(nb), A(nb);
  const Vec2T<S> pb_dot(v[0], v[1]);
  V[0] = subspace_column(model, kin, 0) * v[0] + subspace_column(model, kin, 1) * v[1] +
         subspace_column(model, kin, 2) * v[2];
  A[0] = Vec3T<S>(S(0), pb_dot[1], -pb_dot[0]) * v[2];
  for (int k = 1; k < nb; ++k) {
    const Body& b = model.bodies[k];
    const int p = b.parent;
    const Vec2T<S>& anchor = kin.origin[k];
    const Vec2T<S> a_dot = Vec2T<S>(V[p][1], V[p][2]) + rot90<S>(anchor) * V[p][0];
    V[k] = V[p] + subspace_column(model, kin, b.coord) * v[b.coord];
    A[k] = A[p] + Vec3T<S>(S(0), a_dot[1], -a_dot[0]) * v[b.coord];
  }
  const Vec3T<S>& Ab = A[cf.body];
  const S omega = V[cf.body][0];
  out.jdot_v = Vec2T<S>(Ab[1], Ab[2]) + rot90<S>(out.position) * Ab[0] + rot90<S>(out.velocity) * omega;
  return out;
}

template <typename S>
MatX<S> contact_jacobian(const RobotModel& model, const KinCache<S>& kin, const VecX<S>& q,
                         const VecX<S>& v, const ContactSet& contacts, VecX<S>* jdot_v) {
  const int h = contacts.dim();
  MatX<S> J(h, model.nq());
  if (jdot_v) jdot_v->resize(h);
  for (size_t i = 0; i < contacts.frames.size(); ++i) {
    const FrameKin<S> fk = frame_kinematics(model, kin, q, v, contacts.frames[i]);
    J.row(2 * i) = fk.jacobian.row(0);
    J.row(2 * i + 1) = fk.jacobian.row(1);
    if (jdot_v) {
      (*jdot_v)[2 * i] = fk.jdot_v[0];
      (*jdot_v)[2 * i + 1] = fk.jdot_v[1];
    }
  }
  return J;
}

template <typename S>
MatX<S> to_value_matrix(const MatX<S>& A) {
  Eigen::MatrixXd out(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) out(i, j) = math::value(A(i, j));
  return out;
}

inline Eigen::MatrixXd to_value_matrix(const Eigen::MatrixXd& A) { return A; }

// Contact-constrained forward dynamics: solves
//   M a + H = B u + J^T F,   J a + Jdot v = 0
// for (a, F). With an empty contact set this reduces to free dynamics.
template <typename S>
void constrained_dynamics(const RobotModel& model, const VecX<S>& q, const VecX<S>& v,
                          const VecX<S>& u, const ContactSet& contacts, VecX<S>* a_out,
                          VecX<S>* force_out, double rank_tol = 1e-10) {
  const int n = model.nq();
  const KinCache<S> kin = forward_kinematics(model, q);
  const MatX<S> M = mass_matrix(model, kin);
  const VecX<S> H = inverse_dynamics<S>(model, kin, q, v, VecX<S>::Zero(n));

  VecX<S> applied = VecX<S>::Zero(n);
  for (int j = 0; j < model.nu(); ++j) applied[model.actuated[j]] += u[j];

  if (contacts.frames.empty()) {
    MatX<S> rhs = applied - H;
    *a_out = math::solve_dense<S>(M, rhs).col(0);
    force_out->resize(0);
    return;
  }

  VecX<S> jdot_v;
  const MatX<S> J = contact_jacobian(model, kin, q, v, contacts, &jdot_v);
  const int h = contacts.dim();

  // Minv * [J^T, (Bu - H)] in one factorization.
  MatX<S> rhs(n, h + 1);
  rhs.leftCols(h) = J.transpose();
  rhs.col(h) = applied - H;
  const MatX<S> X = math::solve_dense<S>(M, rhs);
  const MatX<S> MinvJt = X.leftCols(h);
  const VecX<S> a_free = X.col(h);

  MatX<S> A_f = J * MinvJt;  // J Minv J^T
  if (math::rcond_spd(to_value_matrix<S>(A_f)) < rank_tol) {
    throw ModelError("rank-deficient contact Jacobian stack");
  }
  MatX<S> rhs_f = -(J * a_free + jdot_v);
  const VecX<S> F = math::solve_dense<S>(A_f, rhs_f).col(0);
  *a_out = a_free + MinvJt * F;
  *force_out = F;
}

// Velocity projection of the plastic impact: v+ = (I - Minv J^T (J Minv J^T)^-1 J) v.
template <typename S>
VecX<S> impact_velocity(const RobotModel& model, const VecX<S>& q, const VecX<S>& v,
                        const ContactSet& contacts, double rank_tol = 1e-10) {
  if (contacts.frames.empty()) return v;
  const KinCache<S> kin = forward_kinematics(model, q);
  const MatX<S> M = mass_matrix(model, kin);
  const MatX<S> J = contact_jacobian(model, kin, q, v, contacts, static_cast<VecX<S>*>(nullptr));
  const int h = contacts.dim();
  MatX<S> Jt = J.transpose();
  const MatX<S> MinvJt = math::solve_dense<S>(M, Jt);
  MatX<S> A_f = J * MinvJt;
  if (math::rcond_spd(to_value_matrix<S>(A_f)) < rank_tol) {
    throw ModelError("rank-deficient contact Jacobian stack");
  }
  MatX<S> Jv = J * v;
  const VecX<S> lambda = math::solve_dense<S>(A_f, Jv).col(0);
  return v - MinvJt * lambda;
}

}  // namespace gaitforge::model
