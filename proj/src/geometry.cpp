#include "textrts/geometry.hpp"

#include <algorithm>

namespace textrts {

Camera make_camera(Vec2 center, double map_w, double map_h) {
  double half = kCameraSpan / 2.0;
  Camera cam;
  cam.center.x = std::clamp(center.x, half, std::max(half, map_w - half));
  cam.center.y = std::clamp(center.y, half, std::max(half, map_h - half));
  return cam;
}

FrameResult world_to_screen(Vec2 p, const Camera& cam) {
  Vec2 o = cam.origin();
  double fx = (p.x - o.x) / kCameraSpan * kFrameSize;
  double fy = (p.y - o.y) / kCameraSpan * kFrameSize;
  FrameResult r;
  r.pixel = {static_cast<int>(std::floor(fx)), static_cast<int>(std::floor(fy))};
  r.in_frame = fx >= 0 && fy >= 0 && fx < kFrameSize && fy < kFrameSize;
  return r;
}

Vec2 screen_to_world(GridCoord px, const Camera& cam) {
  Vec2 o = cam.origin();
  return {o.x + px.x / static_cast<double>(kFrameSize) * kCameraSpan,
          o.y + px.y / static_cast<double>(kFrameSize) * kCameraSpan};
}

FrameResult world_to_minimap(Vec2 p, double map_w, double map_h) {
  double fx = p.x / map_w * kFrameSize;
  double fy = p.y / map_h * kFrameSize;
  FrameResult r;
  r.pixel = {static_cast<int>(std::floor(fx)), static_cast<int>(std::floor(fy))};
  r.in_frame = fx >= 0 && fy >= 0 && fx < kFrameSize && fy < kFrameSize;
  return r;
}

Vec2 minimap_to_world(GridCoord px, double map_w, double map_h) {
  return {px.x / static_cast<double>(kFrameSize) * map_w,
          px.y / static_cast<double>(kFrameSize) * map_h};
}

}  // namespace textrts
