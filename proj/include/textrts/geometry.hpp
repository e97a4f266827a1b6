#pragma once

#include <cmath>

namespace textrts {

// Both the screen and the minimap are 64x64 pixel grids. The screen covers
// the camera's 24x24 world-unit rectangle; the minimap covers the whole map.
inline constexpr int kFrameSize = 64;
inline constexpr double kCameraSpan = 24.0;

struct Vec2 {
  double x = 0;
  double y = 0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2&) const = default;

  double length() const { return std::sqrt(x * x + y * y); }
  Vec2 normalized() const {
    double len = length();
    return len > 1e-12 ? Vec2{x / len, y / len} : Vec2{};
  }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).length(); }

struct GridCoord {
  int x = 0;
  int y = 0;
  bool operator==(const GridCoord&) const = default;
};

// Axis-aligned camera rectangle, kCameraSpan wide and high. y grows south.
struct Camera {
  Vec2 center;
  double half_span() const { return kCameraSpan / 2.0; }
  Vec2 origin() const { return {center.x - half_span(), center.y - half_span()}; }
  bool contains(Vec2 p) const {
    Vec2 o = origin();
    return p.x >= o.x && p.y >= o.y && p.x < o.x + kCameraSpan && p.y < o.y + kCameraSpan;
  }
};

// Clamps the camera rectangle inside the map bounds.
Camera make_camera(Vec2 center, double map_w, double map_h);

struct FrameResult {
  GridCoord pixel;
  bool in_frame = false;  // conversions out of frame are flagged, never clamped
};

FrameResult world_to_screen(Vec2 p, const Camera& cam);
Vec2 screen_to_world(GridCoord px, const Camera& cam);  // cell min-corner
FrameResult world_to_minimap(Vec2 p, double map_w, double map_h);
Vec2 minimap_to_world(GridCoord px, double map_w, double map_h);  // cell min-corner

}  // namespace textrts
