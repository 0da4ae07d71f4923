#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ppt/su2.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

// Caption values are in pi/T units.
inline ppt::PulseTrain caption_train(double rabi, std::vector<double> detunings,
                                     ppt::Symmetry s = ppt::Symmetry::General) {
  for (double& d : detunings) d *= kPi;
  return ppt::PulseTrain::from_detunings(rabi * kPi, detunings, s);
}

inline ppt::PulseTrain x3() { return caption_train(0.6397, {0.72, 0.0, -0.72}, ppt::Symmetry::Antisymmetric); }
inline ppt::PulseTrain x5() {
  return caption_train(0.5583, {0.8980, 0.1412, 0.0, -0.1412, -0.8980}, ppt::Symmetry::Antisymmetric);
}
inline ppt::PulseTrain x11() {
  return caption_train(0.4795, {1.1164, 0.2309, 0.4414, 0.0233, 0.1611, 0.0, -0.1611, -0.0233, -0.4414, -0.2309,
                                -1.1164},
                       ppt::Symmetry::Antisymmetric);
}
inline ppt::PulseTrain h3() { return caption_train(0.7014, {1.1789, 0.0, -1.1789}, ppt::Symmetry::Antisymmetric); }
inline ppt::PulseTrain x4() {
  return caption_train(0.6750, {-0.9267, 0.0227, -0.0227, 0.9267}, ppt::Symmetry::Antisymmetric);
}
inline ppt::PulseTrain x7() {
  return caption_train(0.4036, {0.7207, -0.1269, 0.2682, 0.5699, 0.2682, -0.1269, 0.7207}, ppt::Symmetry::Symmetric);
}
inline ppt::PulseTrain x8() {
  return caption_train(0.6197, {0.3847, 0.5165, -2.4852, 0.549, 0.4073, 0.3837, 0.0138, -0.8335});
}
inline ppt::PulseTrain h8() {
  return caption_train(0.825, {2.6171, 0.5036, 0.2977, 0.1954, 0.8605, -0.6183, 1.8844, 1.8191});
}
inline ppt::PulseTrain fig4_n2() { return caption_train(0.937, {0.735, -0.735}, ppt::Symmetry::Antisymmetric); }
inline ppt::PulseTrain fig4_n4() {
  return caption_train(0.9, {3.028, 0.609, -0.609, -3.028}, ppt::Symmetry::Antisymmetric);
}

inline ppt::PulseTrain pi_pulse() {
  const std::vector<double> d{0.0};
  return ppt::PulseTrain::from_detunings(kPi, d);
}

inline ppt::PulseTrain random_train(std::mt19937_64& rng, std::size_t length) {
  std::uniform_real_distribution<double> rabi(0.1, 2.0 * kPi), det(-2.0 * kPi, 2.0 * kPi);
  const double r = rabi(rng);
  std::vector<double> d(length);
  for (double& v : d) v = det(rng);
  return ppt::PulseTrain::from_detunings(r, d);
}

}  // namespace testing
