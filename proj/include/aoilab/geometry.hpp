#pragma once

#include <cmath>

namespace aoilab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double horizontal_distance(const Vec3& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline Vec3 lift(const Vec2& p, double z) { return {p.x, p.y, z}; }

}  // namespace aoilab
