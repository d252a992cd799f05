#include "inkmotion/rotation.hpp"

#include <algorithm>
#include <cmath>

namespace inkmotion {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }
}  // namespace

double UnitQuaternion::norm() const {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

UnitQuaternion UnitQuaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

UnitQuaternion quat_from_axis_angle(double ax, double ay, double az,
                                    double angle_deg) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  const double half = 0.5 * deg2rad(angle_deg);
  const double s = std::sin(half);
  if (n == 0.0) return {1, 0, 0, 0};
  return {std::cos(half), s * ax / n, s * ay / n, s * az / n};
}

UnitQuaternion quat_from_euler_deg(double yaw, double pitch, double roll) {
  const UnitQuaternion qz = quat_from_axis_angle(0, 0, 1, yaw);
  const UnitQuaternion qy = quat_from_axis_angle(0, 1, 0, pitch);
  const UnitQuaternion qx = quat_from_axis_angle(1, 0, 0, roll);
  return quat_multiply(quat_multiply(qz, qy), qx);
}

void euler_deg_from_quat(const UnitQuaternion& q, double& yaw, double& pitch,
                         double& roll) {
  // rotation matrix entries needed for Z-Y-X extraction
  const double r20 = 2.0 * (q.x * q.z - q.w * q.y);
  const double s = std::clamp(-r20, -1.0, 1.0);
  if (std::abs(s) > 1.0 - 1e-12) {
    // gimbal lock: pitch at +/-90, fold roll into yaw
    pitch = std::copysign(90.0, s);
    roll = 0.0;
    const double r01 = 2.0 * (q.x * q.y - q.w * q.z);
    const double r11 = 1.0 - 2.0 * (q.x * q.x + q.z * q.z);
    yaw = rad2deg(std::atan2(-r01, r11));
    return;
  }
  const double r10 = 2.0 * (q.x * q.y + q.w * q.z);
  const double r00 = 1.0 - 2.0 * (q.y * q.y + q.z * q.z);
  const double r21 = 2.0 * (q.y * q.z + q.w * q.x);
  const double r22 = 1.0 - 2.0 * (q.x * q.x + q.y * q.y);
  yaw = rad2deg(std::atan2(r10, r00));
  pitch = rad2deg(std::asin(s));
  roll = rad2deg(std::atan2(r21, r22));
}

double quat_angle_deg(const UnitQuaternion& q) {
  const double c = std::clamp(std::abs(q.w), 0.0, 1.0);
  return rad2deg(2.0 * std::acos(c));
}

UnitQuaternion random_small_quaternion(double max_angle_deg,
                                       std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double ax = 0, ay = 0, az = 0, n = 0;
  do {
    ax = gauss(rng);
    ay = gauss(rng);
    az = gauss(rng);
    n = ax * ax + ay * ay + az * az;
  } while (n < 1e-12);
  std::uniform_real_distribution<double> u(0.0, max_angle_deg);
  return quat_from_axis_angle(ax, ay, az, u(rng));
}

}  // namespace inkmotion
