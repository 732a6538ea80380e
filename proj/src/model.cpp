#include "gaitforge/model/model.hpp"

#include <set>

#include <json.hpp>

#include "gaitforge/util/util.hpp"

namespace gaitforge::model {

using nlohmann::json;

namespace {

Eigen::Vector2d vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ModelError(std::string("expected [x, z] for ") + what);
  return {j[0].get<double>(), j[1].get<double>()};
}

void validate(const RobotModel& m) {
  const int n = m.nq();
  if (m.bodies.empty() || m.bodies[0].joint.type != JointType::PlanarFree)
    throw ModelError("first body must carry the planar free base joint");
  for (size_t k = 1; k < m.bodies.size(); ++k) {
    const Body& b = m.bodies[k];
    if (b.joint.type != JointType::Revolute) throw ModelError("non-root joints must be revolute");
    if (b.parent < 0 || b.parent >= static_cast<int>(k))
      throw ModelError("non-tree topology: body '" + b.name + "' must follow its parent");
  }
  for (const Body& b : m.bodies) {
    if (!(b.mass > 0.0)) throw ModelError("nonpositive mass on body '" + b.name + "'");
    if (b.inertia < 0.0) throw ModelError("negative inertia on body '" + b.name + "'");
  }
  if (m.actuated.empty()) throw ModelError("no actuated joints");
  std::set<int> seen;
  for (int c : m.actuated) {
    if (c < 3 || c >= n) throw ModelError("actuated coordinate out of range");
    if (!seen.insert(c).second) throw ModelError("duplicate actuated coordinate");
  }
  for (const ContactFrame& f : m.contacts) {
    if (f.body < 0 || f.body >= static_cast<int>(m.bodies.size()))
      throw ModelError("contact frame '" + f.name + "' references unknown body");
  }
  // Symmetry map must be an involution: applying it twice is the identity.
  Eigen::VectorXd probe(n);
  for (int i = 0; i < n; ++i) probe[i] = 1.0 + i;
  const Eigen::VectorXd twice = m.apply_symmetry(m.apply_symmetry(probe));
  if ((twice - probe).cwiseAbs().maxCoeff() > 0.0) throw ModelError("symmetry not involutive");
  for (const SymmetryPair& p : m.symmetry) {
    if (p.index_a < 0 || p.index_a >= n || p.index_b < 0 || p.index_b >= n)
      throw ModelError("symmetry index out of range");
    if (p.sign != 1.0 && p.sign != -1.0) throw ModelError("symmetry sign must be +-1");
  }
}

}  // namespace

int RobotModel::contact_index(const std::string& frame) const {
  for (size_t i = 0; i < contacts.size(); ++i)
    if (contacts[i].name == frame) return static_cast<int>(i);
  throw ModelError("unknown contact frame: " + frame);
}

int RobotModel::mirrored_frame(int frame) const {
  for (const auto& [a, b] : frame_pairs) {
    if (a == frame) return b;
    if (b == frame) return a;
  }
  return frame;
}

Eigen::VectorXd RobotModel::apply_symmetry(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  for (const SymmetryPair& p : symmetry) {
    y[p.index_a] = p.sign * x[p.index_b];
    y[p.index_b] = p.sign * x[p.index_a];
  }
  return y;
}

Eigen::VectorXd RobotModel::lower_joint_limits() const {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(nq(), -1e18);
  for (size_t k = 1; k < bodies.size(); ++k) lo[bodies[k].coord] = bodies[k].joint.pos_lower;
  return lo;
}

Eigen::VectorXd RobotModel::upper_joint_limits() const {
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(nq(), 1e18);
  for (size_t k = 1; k < bodies.size(); ++k) hi[bodies[k].coord] = bodies[k].joint.pos_upper;
  return hi;
}

Eigen::VectorXd RobotModel::velocity_limits() const {
  Eigen::VectorXd lim = Eigen::VectorXd::Constant(nq(), 1e18);
  for (size_t k = 1; k < bodies.size(); ++k) lim[bodies[k].coord] = bodies[k].joint.vel_limit;
  return lim;
}

Eigen::VectorXd RobotModel::torque_limits() const {
  Eigen::VectorXd lim(nu());
  for (int j = 0; j < nu(); ++j) {
    for (const Body& b : bodies) {
      if (b.coord == actuated[j]) lim[j] = b.joint.torque_limit;
    }
  }
  return lim;
}

RobotModel parse_model(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError("model parse error in " + origin + ": " + e.what());
  }
  try {
    RobotModel m;
    m.name = j.value("name", "unnamed");
    if (j.value("schema_version", 0) != 1) throw ModelError("unsupported model schema_version");
    m.gravity = vec2(j.at("gravity"), "gravity");

    std::vector<std::string> body_names;
    for (const json& jb : j.at("bodies")) {
      Body b;
      b.name = jb.at("name").get<std::string>();
      b.mass = jb.at("mass").get<double>();
      b.com = vec2(jb.at("com"), "com");
      b.inertia = jb.at("inertia").get<double>();
      const json& jj = jb.at("joint");
      const std::string type = jj.at("type").get<std::string>();
      if (m.bodies.empty()) {
        if (type != "planar_free") throw ModelError("root joint must be planar_free");
        b.joint.type = JointType::PlanarFree;
        b.joint.name = jj.value("name", "base");
        b.parent = -1;
      } else {
        if (type != "revolute") throw ModelError("unsupported joint type: " + type);
        b.joint.type = JointType::Revolute;
        b.joint.name = jj.at("name").get<std::string>();
        b.joint.anchor = vec2(jj.at("anchor"), "joint anchor");
        const json& lim = jj.at("pos_limits");
        b.joint.pos_lower = lim[0].get<double>();
        b.joint.pos_upper = lim[1].get<double>();
        b.joint.vel_limit = jj.at("vel_limit").get<double>();
        b.joint.torque_limit = jj.at("torque_limit").get<double>();
        const std::string parent = jb.at("parent").get<std::string>();
        b.parent = -1;
        for (size_t k = 0; k < body_names.size(); ++k)
          if (body_names[k] == parent) b.parent = static_cast<int>(k);
        if (b.parent < 0) throw ModelError("unknown parent body: " + parent);
        b.coord = 2 + static_cast<int>(m.bodies.size());
      }
      body_names.push_back(b.name);
      m.bodies.push_back(b);
    }

    for (const json& ja : j.at("actuated")) {
      const std::string name = ja.get<std::string>();
      int coord = -1;
      for (const Body& b : m.bodies)
        if (b.joint.name == name) coord = b.coord;
      if (coord < 0) throw ModelError("unknown actuated joint: " + name);
      m.actuated.push_back(coord);
    }

    for (const json& jc : j.at("contact_frames")) {
      ContactFrame f;
      f.name = jc.at("name").get<std::string>();
      const std::string body = jc.at("body").get<std::string>();
      f.body = -1;
      for (size_t k = 0; k < body_names.size(); ++k)
        if (body_names[k] == body) f.body = static_cast<int>(k);
      f.offset = vec2(jc.at("offset"), "contact offset");
      m.contacts.push_back(f);
    }

    const json& js = j.at("symmetry");
    for (const json& jp : js.at("coordinate_pairs")) {
      SymmetryPair p;
      p.index_a = jp[0].get<int>();
      p.index_b = jp[1].get<int>();
      p.sign = jp[2].get<double>();
      m.symmetry.push_back(p);
    }
    if (js.contains("frame_pairs")) {
      for (const json& jp : js.at("frame_pairs")) {
        m.frame_pairs.emplace_back(m.contact_index(jp[0].get<std::string>()),
                                   m.contact_index(jp[1].get<std::string>()));
      }
    }

    m.fingerprint = util::fnv1a_hex(text);
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw ModelError("model schema error in " + origin + ": " + e.what());
  }
}

RobotModel load_model(const std::string& path) {
  return parse_model(util::read_file(path), path);
}

}  // namespace gaitforge::model
