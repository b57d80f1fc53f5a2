#pragma once

#include <Eigen/Core>

namespace mot {

using Vec2 = Eigen::Vector2d;
using Vec2i = Eigen::Vector2i;
using Vec3 = Eigen::Vector3d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace mot
