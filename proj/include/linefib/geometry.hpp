#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace linefib {

using Vec3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

}  // namespace linefib
