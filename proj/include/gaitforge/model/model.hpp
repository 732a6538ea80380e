#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitforge::model {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class JointType { PlanarFree, Revolute };

struct Joint {
  JointType type{JointType::Revolute};
  std::string name;
  Eigen::Vector2d anchor{0.0, 0.0};  // in parent frame; unused for the free base
  double pos_lower{-1e9};
  double pos_upper{1e9};
  double vel_limit{1e9};
  double torque_limit{1e9};
};

struct Body {
  std::string name;
  int parent{-1};  // body index, -1 for the root
  Joint joint;
  double mass{0.0};
  Eigen::Vector2d com{0.0, 0.0};  // in body frame
  double inertia{0.0};            // rotational inertia about the COM
  // Filled in at load time:
  int coord{-1};  // generalized-coordinate index of this body's joint (root: 0..2)
};

struct ContactFrame {
  std::string name;
  int body{-1};
  Eigen::Vector2d offset{0.0, 0.0};  // in body frame
};

struct SymmetryPair {
  int index_a{0};
  int index_b{0};
  double sign{1.0};
};

// Planar floating-base kinematic tree. Immutable after load; shareable
// across threads.
struct RobotModel {
  std::string name;
  Eigen::Vector2d gravity{0.0, -9.81};
  std::vector<Body> bodies;              // bodies[0] is the floating base
  std::vector<int> actuated;             // coordinate indices driven by torques
  std::vector<ContactFrame> contacts;
  std::vector<SymmetryPair> symmetry;    // joint-coordinate pairing
  std::vector<std::pair<int, int>> frame_pairs;  // contact-frame mirror pairing
  std::string fingerprint;               // content hash of the source file

  int nq() const { return 3 + static_cast<int>(bodies.size()) - 1; }
  int nu() const { return static_cast<int>(actuated.size()); }

  Eigen::MatrixXd actuation_matrix() const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nq(), nu());
    for (int j = 0; j < nu(); ++j) B(actuated[j], j) = 1.0;
    return B;
  }

  int contact_index(const std::string& frame) const;
  int mirrored_frame(int frame) const;  // partner under the symmetry map

  // Applies the symmetry map to a coordinate-space vector (no translation
  // zeroing). The map is its own inverse.
  Eigen::VectorXd apply_symmetry(const Eigen::VectorXd& x) const;

  Eigen::VectorXd lower_joint_limits() const;  // size nq, +-inf on the base
  Eigen::VectorXd upper_joint_limits() const;
  Eigen::VectorXd velocity_limits() const;     // size nq, +inf on the base
  Eigen::VectorXd torque_limits() const;       // size nu
};

struct State {
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  double t{0.0};
};

// Active point contacts; each constrains (x, z) of its frame.
struct ContactSet {
  std::vector<int> frames;

  int dim() const { return 2 * static_cast<int>(frames.size()); }
  static ContactSet none() { return {}; }
  static ContactSet single(int frame) { return {{frame}}; }
};

RobotModel load_model(const std::string& path);
RobotModel parse_model(const std::string& json_text, const std::string& origin);

}  // namespace gaitforge::model
