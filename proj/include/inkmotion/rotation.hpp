#pragma once

#include <random>

// Orientation math for yaw/pitch/roll handling. Euler angles follow the
// intrinsic Z-Y-X convention (yaw about the vertical axis, then pitch, then
// roll), the usual convention for IMU output. Angles are degrees.

namespace inkmotion {

struct UnitQuaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  double norm() const;
  UnitQuaternion normalized() const;
  UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }
};

UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b);

// axis need not be normalized; angle in degrees
UnitQuaternion quat_from_axis_angle(double ax, double ay, double az,
                                    double angle_deg);

UnitQuaternion quat_from_euler_deg(double yaw, double pitch, double roll);

// Gimbal-lock rows (|pitch| within ~1e-6 deg of 90) take the documented
// fold: roll is set to 0 and yaw absorbs the remaining rotation. Never NaN.
void euler_deg_from_quat(const UnitQuaternion& q, double& yaw, double& pitch,
                         double& roll);

// angle of the rotation in degrees, in [0, 180]
double quat_angle_deg(const UnitQuaternion& q);

// uniform random unit axis, angle uniform in [0, max_angle_deg]
UnitQuaternion random_small_quaternion(double max_angle_deg,
                                       std::mt19937_64& rng);

}  // namespace inkmotion
