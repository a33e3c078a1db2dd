#include "vrsal/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace vrsal {

Image::Image(int w, int h, int ch, float fill) : width(w), height(h), channels(ch) {
    if (w < 0 || h < 0 || (ch != 1 && ch != 3))
        throw Error("Image: bad dimensions " + std::to_string(w) + "x" + std::to_string(h) +
                    " ch=" + std::to_string(ch));
    data.assign(std::size_t(w) * h * ch, fill);
}

float Image::sample_clamped(double px, double py, int c) const {
    px = std::clamp(px, 0.0, double(width - 1));
    py = std::clamp(py, 0.0, double(height - 1));
    const int x0 = int(px);
    const int y0 = int(py);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = px - x0;
    const double fy = py - y0;
    const float top = lerp(at(x0, y0, c), at(x1, y0, c), fx);
    const float bot = lerp(at(x0, y1, c), at(x1, y1, c), fx);
    return lerp(top, bot, fy);
}

Image Image::to_gray() const {
    if (channels == 1) return *this;
    Image out(width, height, 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            out.at(x, y) = 0.299f * at(x, y, 0) + 0.587f * at(x, y, 1) + 0.114f * at(x, y, 2);
    return out;
}

double Image::sum(int c) const {
    double s = 0;
    for (std::size_t i = c; i < data.size(); i += channels) s += data[i];
    return s;
}

void Image::check_finite(const std::string& context) const {
    for (float v : data)
        if (!std::isfinite(v)) throw Error(context + ": non-finite sample value");
}

// --- resampling --------------------------------------------------------------

namespace {

// Catmull-Rom kernel, support [-2, 2].
double cubic_weight(double t) {
    t = std::fabs(t);
    if (t < 1.0) return 1.5 * t * t * t - 2.5 * t * t + 1.0;
    if (t < 2.0) return -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0;
    return 0.0;
}

// One separable pass along x; transposes via the caller running it twice.
Image resize_axis_cubic(const Image& src, int dstW) {
    Image out(dstW, src.height, src.channels);
    const double scale = double(src.width) / dstW;
    for (int dx = 0; dx < dstW; ++dx) {
        const double sx = (dx + 0.5) * scale - 0.5;
        const int base = int(std::floor(sx));
        double w[4];
        double wsum = 0;
        for (int k = 0; k < 4; ++k) {
            w[k] = cubic_weight(sx - (base - 1 + k)) ;
            wsum += w[k];
        }
        for (int k = 0; k < 4; ++k) w[k] /= wsum;
        for (int y = 0; y < src.height; ++y) {
            for (int c = 0; c < src.channels; ++c) {
                double acc = 0;
                for (int k = 0; k < 4; ++k) {
                    const int x = std::clamp(base - 1 + k, 0, src.width - 1);
                    acc += w[k] * src.at(x, y, c);
                }
                out.at(dx, y, c) = float(acc);
            }
        }
    }
    return out;
}

Image transpose(const Image& src) {
    Image out(src.height, src.width, src.channels);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < src.channels; ++c) out.at(y, x, c) = src.at(x, y, c);
    return out;
}

}  // namespace

Image resize_bicubic(const Image& src, int dstW, int dstH) {
    if (src.empty()) throw Error("resize_bicubic: empty source");
    if (dstW < 1 || dstH < 1) throw Error("resize_bicubic: bad target size");
    Image tmp = resize_axis_cubic(src, dstW);
    return transpose(resize_axis_cubic(transpose(tmp), dstH));
}

Image resize_bilinear(const Image& src, int dstW, int dstH) {
    if (src.empty()) throw Error("resize_bilinear: empty source");
    if (dstW < 1 || dstH < 1) throw Error("resize_bilinear: bad target size");
    Image out(dstW, dstH, src.channels);
    const double sx = double(src.width) / dstW;
    const double sy = double(src.height) / dstH;
    for (int y = 0; y < dstH; ++y)
        for (int x = 0; x < dstW; ++x)
            for (int c = 0; c < src.channels; ++c)
                out.at(x, y, c) = src.sample_clamped((x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5, c);
    return out;
}

// --- PNG ----------------------------------------------------------------------

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error("load_png: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("load_png: png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("load_png: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("load_png: failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int bitDepth = png_get_bit_depth(png, info);
    const int colorType = png_get_color_type(png, info);

    if (colorType == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (colorType == PNG_COLOR_TYPE_GRAY && bitDepth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (bitDepth == 16) png_set_swap(png);  // libpng delivers big-endian 16-bit
    png_read_update_info(png, info);

    const int outChannels = png_get_channels(png, info);
    const int outDepth = png_get_bit_depth(png, info);
    if (outChannels != 1 && outChannels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("load_png: unsupported channel count in " + path);
    }

    Image img(int(w), int(h), outChannels);
    const std::size_t rowBytes = png_get_rowbytes(png, info);
    std::vector<unsigned char> row(rowBytes);
    const float scale = (outDepth == 16) ? 1.0f / 65535.0f : 1.0f / 255.0f;
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        if (outDepth == 16) {
            const uint16_t* p = reinterpret_cast<const uint16_t*>(row.data());
            for (std::size_t i = 0; i < std::size_t(w) * outChannels; ++i)
                img.data[std::size_t(y) * w * outChannels + i] = p[i] * scale;
        } else {
            for (std::size_t i = 0; i < std::size_t(w) * outChannels; ++i)
                img.data[std::size_t(y) * w * outChannels + i] = row[i] * scale;
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const std::string& path, const Image& img, int bitDepth) {
    if (img.empty()) throw Error("save_png: empty image");
    if (bitDepth != 8 && bitDepth != 16) throw Error("save_png: bit depth must be 8 or 16");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("save_png: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("save_png: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("save_png: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("save_png: failed to encode " + path);
    }
    png_init_io(png, fp.get());
    const int colorType = (img.channels == 1) ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, bitDepth, colorType, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bitDepth == 16) png_set_swap(png);

    const std::size_t rowElems = std::size_t(img.width) * img.channels;
    if (bitDepth == 8) {
        std::vector<unsigned char> row(rowElems);
        for (int y = 0; y < img.height; ++y) {
            for (std::size_t i = 0; i < rowElems; ++i) {
                const float v = std::clamp(img.data[std::size_t(y) * rowElems + i], 0.0f, 1.0f);
                row[i] = (unsigned char)std::lround(v * 255.0f);
            }
            png_write_row(png, row.data());
        }
    } else {
        std::vector<uint16_t> row(rowElems);
        for (int y = 0; y < img.height; ++y) {
            for (std::size_t i = 0; i < rowElems; ++i) {
                const float v = std::clamp(img.data[std::size_t(y) * rowElems + i], 0.0f, 1.0f);
                row[i] = (uint16_t)std::lround(v * 65535.0f);
            }
            png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// --- PFM ----------------------------------------------------------------------
// Header: "Pf" (gray) or "PF" (RGB), then "W H", then scale (sign = endianness).
// Rows are stored bottom-up, matching the format convention.

Image load_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_pfm: cannot open " + path);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0;
    in >> magic >> w >> h >> scale;
    if (!in || (magic != "Pf" && magic != "PF") || w < 1 || h < 1 || scale == 0)
        throw Error("load_pfm: malformed header in " + path);
    in.get();  // single whitespace after the header
    const int ch = (magic == "PF") ? 3 : 1;
    Image img(w, h, ch);
    std::vector<float> row(std::size_t(w) * ch);
    const bool littleEndian = scale < 0;
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(float)));
        if (!in) throw Error("load_pfm: truncated data in " + path);
        if (!littleEndian) {
            for (float& v : row) {
                uint32_t u;
                std::memcpy(&u, &v, 4);
                u = __builtin_bswap32(u);
                std::memcpy(&v, &u, 4);
            }
        }
        std::copy(row.begin(), row.end(), img.data.begin() + std::size_t(y) * w * ch);
    }
    img.check_finite("load_pfm(" + path + ")");
    return img;
}

void save_pfm(const std::string& path, const Image& img) {
    if (img.empty()) throw Error("save_pfm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_pfm: cannot open " + path);
    out << (img.channels == 3 ? "PF" : "Pf") << "\n" << img.width << " " << img.height << "\n-1.0\n";
    const std::size_t rowElems = std::size_t(img.width) * img.channels;
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(img.data.data() + std::size_t(y) * rowElems),
                  std::streamsize(rowElems * sizeof(float)));
    if (!out) throw Error("save_pfm: write failed for " + path);
}

Image load_image(const std::string& path) {
    const auto dotPos = path.find_last_of('.');
    const std::string ext = (dotPos == std::string::npos) ? "" : path.substr(dotPos + 1);
    if (ext == "pfm" || ext == "PFM") return load_pfm(path);
    if (ext == "png" || ext == "PNG") return load_png(path);
    throw Error("load_image: unsupported extension on " + path);
}

}  // namespace vrsal
