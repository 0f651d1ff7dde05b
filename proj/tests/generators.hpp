#pragma once

// Random inputs shared by the property suites and the acceptance binary.

#include <random>
#include <vector>

#include "iliosim/anatomy.hpp"
#include "iliosim/session.hpp"
#include "iliosim/wire.hpp"

namespace gen {

using iliosim::Vec2;
using iliosim::Vec3;

// Entry on the skin near the landmark, aimed at a point in a box around the
// corridor, so that intra- and extra-osseous outcomes are both common.
inline iliosim::WirePose random_pose(const iliosim::anatomy::AnatomyModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> depth(0.0, 200.0);
  const auto& c = m.corridor;
  const auto [t1, t2] = iliosim::anatomy::skin_tangents(m);
  iliosim::WirePose pose;
  pose.entry = iliosim::anatomy::skin_landmark(m) + 12.0 * u(rng) * t1 + 12.0 * u(rng) * t2;
  const Vec3 target = c.center + 30.0 * u(rng) * c.axis + 15.0 * u(rng) * c.major_dir + 10.0 * u(rng) * c.minor_dir();
  pose.direction = (target - pose.entry).normalized();
  pose.depth = depth(rng);
  return pose;
}

inline iliosim::RigidTransform random_rigid(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  iliosim::RigidTransform xf = iliosim::RigidTransform::Identity();
  xf.linear() = q.toRotationMatrix();
  xf.translation() = Vec3(g(rng), g(rng), g(rng)) * 50.0;
  return xf;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6) v = Vec3(n(rng), n(rng), n(rng));
  return v.normalized();
}

// Fuzzed trainee script. Roughly one command in seven is malformed or
// illegal for the phase it is likely to meet.
inline std::vector<iliosim::session::Command> random_script(const iliosim::anatomy::AnatomyModel& m,
                                                            std::mt19937_64& rng, int max_len = 40) {
  namespace cmd = iliosim::session::cmd;
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<int> kind(0, 99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> view(0, 2);
  std::vector<iliosim::session::Command> script;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const int k = kind(rng);
    if (k < 12) {
      script.push_back(cmd::Place{Vec2(8.0 * u(rng), 8.0 * u(rng))});
    } else if (k < 22) {
      Vec3 d = m.corridor.axis + 0.25 * Vec3(u(rng), u(rng), u(rng));
      if (k < 20) d.normalize();  // otherwise non-unit
      script.push_back(cmd::Orientate{d});
    } else if (k < 24) {
      script.push_back(cmd::Orientate{-m.corridor.axis});  // outward
    } else if (k < 44) {
      script.push_back(cmd::PushIn{k < 42 ? 5.0 + 60.0 * (u(rng) + 1.0) : -3.0});
    } else if (k < 56) {
      script.push_back(cmd::Return{});
    } else if (k < 76) {
      script.push_back(cmd::XRay{static_cast<iliosim::fluoro::ViewName>(view(rng))});
    } else if (k < 86) {
      script.push_back(cmd::Previous{});
    } else if (k < 96) {
      script.push_back(cmd::Following{});
    } else {
      script.push_back(cmd::Confirm{});
    }
  }
  return script;
}

}  // namespace gen
