// Planar raster type with PNG/PFM I/O and separable resampling.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrsal {

// Library-wide error type. Operations throw this (or std::invalid_argument)
// on contract violations; messages name the offending input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Row-major float raster, 1 (gray) or 3 (RGB) channels.
// Pixel values from 8/16-bit files are scaled to [0, 1]; float maps are kept as-is.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int ch = 1, float fill = 0.0f);

    bool empty() const { return data.empty(); }
    std::size_t size() const { return data.size(); }

    float& at(int x, int y, int c = 0) { return data[(std::size_t(y) * width + x) * channels + c]; }
    float at(int x, int y, int c = 0) const { return data[(std::size_t(y) * width + x) * channels + c]; }

    // Bilinear sample at continuous pixel coordinates (px, py), where integer
    // coordinates land on pixel centers. Coordinates clamp to the image edge.
    // Lerp-form interpolation: constant inputs reproduce exactly.
    float sample_clamped(double px, double py, int c = 0) const;

    Image to_gray() const;           // 0.299 R + 0.587 G + 0.114 B
    double sum(int c = 0) const;
    void check_finite(const std::string& context) const;
};

inline float lerp(float a, float b, double t) { return float(a + t * (b - a)); }

// Separable Catmull-Rom resize to an arbitrary target size (used by the
// compression down/up path and by import of off-resolution maps).
Image resize_bicubic(const Image& src, int dstW, int dstH);
Image resize_bilinear(const Image& src, int dstW, int dstH);

// --- file I/O ---------------------------------------------------------------
// PNG: 8- or 16-bit, gray or RGB. PFM: 32-bit float, gray ("Pf") or RGB ("PF").
// Format chosen by extension on load; save_* is explicit.

Image load_image(const std::string& path);
Image load_png(const std::string& path);
Image load_pfm(const std::string& path);
void save_png(const std::string& path, const Image& img, int bitDepth = 8);
void save_pfm(const std::string& path, const Image& img);

}  // namespace vrsal
