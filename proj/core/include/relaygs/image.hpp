#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace relaygs {

// Row-major H x W x 3 image, values nominally in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // interleaved RGB

    Image() = default;
    Image(int w, int h, double fill = 0.0) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, fill) {}

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    size_t size() const { return data.size(); }

    double* pixel(int x, int y) { return data.data() + 3 * (static_cast<size_t>(y) * width + x); }
    const double* pixel(int x, int y) const { return data.data() + 3 * (static_cast<size_t>(y) * width + x); }

    Eigen::Vector3d at(int x, int y) const {
        const double* p = pixel(x, y);
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, const Eigen::Vector3d& c) {
        double* p = pixel(x, y);
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }

    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

// Clamps every channel into [0, 1] in place.
void clamp01(Image& img);

// Exact byte-level equality.
bool bitwise_equal(const Image& a, const Image& b);

}  // namespace relaygs
