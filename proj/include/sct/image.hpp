#pragma once

#include <string>
#include <vector>

#include "sct/geometry.hpp"

namespace sct {

// Grayscale image with intensities in [0, 1], row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    double at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
};

// Square resampled crop of a frame. `resample_scale` is source pixels per
// patch pixel; `region` records the source crop in frame coordinates.
struct Patch {
    int side = 0;
    std::vector<double> v;
    BoundingBox region;
    double resample_scale = 1.0;

    double at(int x, int y) const { return v[static_cast<size_t>(y) * side + x]; }
    double& at(int x, int y) { return v[static_cast<size_t>(y) * side + x]; }
};

// Loads an 8-bit PGM (P5) or PNG image. Color input is reduced to luminance
// (0.299 R + 0.587 G + 0.114 B); intensities are normalized to [0, 1].
Frame load_frame(const std::string& path);

// Writes a frame as binary PGM with maxval 255.
void save_pgm(const Frame& frame, const std::string& path);

// Samples frame intensity at a continuous position with bilinear filtering.
// Positions outside the frame replicate the nearest edge pixel.
double bilinear_sample(const Frame& frame, double x, double y);

// Crops the square search region of side 5 * sqrt(w*h) * scale centered on
// the box and resamples it to side x side.
Patch extract_search_patch(const Frame& frame, const BoundingBox& bbox, double scale, int side);

}  // namespace sct
