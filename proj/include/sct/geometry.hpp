#pragma once

#include <algorithm>
#include <cmath>

namespace sct {

// Axis-aligned box in continuous pixel coordinates, stored center + size.
struct BoundingBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    static BoundingBox from_tlwh(double x, double y, double w, double h) {
        return {x + w / 2.0, y + h / 2.0, w, h};
    }

    double left() const { return cx - w / 2.0; }
    double top() const { return cy - h / 2.0; }
    double right() const { return cx + w / 2.0; }
    double bottom() const { return cy + h / 2.0; }
    double area() const { return w * h; }
    bool valid() const { return w > 0.0 && h > 0.0; }
};

// Intersection over union of two axis-aligned boxes.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace sct
