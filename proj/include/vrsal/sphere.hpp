// Spherical coordinates, angular geometry, and the sphere<->plane projections
// (equirectangular, cube map, gnomonic) used throughout the toolkit.
//
// Conventions, fixed here once:
//   * Directions are (lat, lon) in degrees; lat in [-90, +90] (positive up),
//     lon canonicalized into [-180, +180).
//   * Unit vectors: x = cos(lat)cos(lon), y = cos(lat)sin(lon), z = sin(lat).
//     So (lat 0, lon 0) = +X, (lat 0, lon 90) = +Y, (lat +90) = +Z.
//   * Equirectangular grid: width == 2*height; row 0 touches lat +90, column 0
//     touches lon -180; pixel centers at half-integer offsets, i.e. pixel (x,y)
//     is centered at lon = -180 + (x+0.5)*360/W, lat = 90 - (y+0.5)*180/H.
//   * Cube map: six faces PosX..NegZ, documented in face_frame(); side faces
//     are upright (+Z up), the PosZ face's bottom edge adjoins the PosX face's
//     top edge, the NegZ face's top edge adjoins the PosX face's bottom edge.
//   * All resampling is bilinear in lerp form (exact on constants).
#pragma once

#include "vrsal/image.hpp"

#include <array>
#include <optional>
#include <vector>

namespace vrsal {

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

// Wrap a longitude into [-180, 180).
double wrap_lon(double lonDeg);
// Shortest signed difference a - b, in [-180, 180).
double lon_diff(double aDeg, double bDeg);

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};
double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 normalized(const Vec3& a);

struct SphericalDir {
    double lat = 0;  // degrees, [-90, +90]
    double lon = 0;  // degrees, [-180, +180)

    SphericalDir() = default;
    SphericalDir(double latDeg, double lonDeg);  // canonicalizes; throws if |lat| > 90 + eps
};

Vec3 to_unit(const SphericalDir& d);
SphericalDir to_spherical(const Vec3& v);  // v need not be normalized; keeps lon 0 at the poles

// Great-circle angle in degrees, in [0, 180].
double angular_distance(const SphericalDir& a, const SphericalDir& b);
double angular_distance(const Vec3& a, const Vec3& b);  // inputs assumed unit

// --- equirectangular grid ----------------------------------------------------

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord&) const = default;
};

struct GridDims {
    int width = 0;
    int height = 0;
    bool operator==(const GridDims&) const = default;
};

// Full-sphere equirectangular raster; enforces width == 2*height.
class EquirectGrid {
public:
    EquirectGrid() = default;
    EquirectGrid(int width, int height, int channels = 1, float fill = 0.0f);
    explicit EquirectGrid(Image img);  // validates 2:1 and finite samples

    int width() const { return img_.width; }
    int height() const { return img_.height; }
    int channels() const { return img_.channels; }
    GridDims dims() const { return {img_.width, img_.height}; }
    bool empty() const { return img_.empty(); }

    float& at(int x, int y, int c = 0) { return img_.at(x, y, c); }
    float at(int x, int y, int c = 0) const { return img_.at(x, y, c); }

    const Image& image() const { return img_; }
    Image& image() { return img_; }

    // Bilinear sample at a direction; wraps in longitude, clamps in latitude.
    float sample(const SphericalDir& d, int c = 0) const;

private:
    Image img_;
};

// Direction of the center of pixel p. Throws if p lies outside the grid.
SphericalDir pixel_to_dir(const PixelCoord& p, const GridDims& g);
// Pixel whose center is nearest to d. Longitude wraps; lat +/-90 clamps to the
// edge rows. Boundary ties resolve to the lower index.
PixelCoord dir_to_pixel(const SphericalDir& d, const GridDims& g);

// Rotate grid content by an integer number of columns (positive = toward +lon).
EquirectGrid rotate_columns(const EquirectGrid& src, int columns);

// --- cube map -----------------------------------------------------------------

enum class CubeFace { PosX = 0, NegX, PosY, NegY, PosZ, NegZ };
constexpr int kNumCubeFaces = 6;

struct FaceFrame {
    Vec3 normal;  // outward face normal
    Vec3 right;   // direction of increasing face column
    Vec3 up;      // direction of decreasing face row
};
FaceFrame face_frame(CubeFace f);

class CubeMap {
public:
    CubeMap() = default;
    CubeMap(int faceRes, int channels = 1, float fill = 0.0f);

    int face_res() const { return faceRes_; }
    int channels() const { return channels_; }
    Image& face(CubeFace f) { return faces_[int(f)]; }
    const Image& face(CubeFace f) const { return faces_[int(f)]; }

private:
    int faceRes_ = 0;
    int channels_ = 1;
    std::array<Image, kNumCubeFaces> faces_;
};

// Ray through the center of face pixel (ix, iy).
Vec3 cubeface_pixel_dir(CubeFace f, int ix, int iy, int faceRes);
// Face containing direction d plus in-face coordinates s,t in [-1, 1].
struct CubeCoord {
    CubeFace face;
    double s;
    double t;
};
CubeCoord dir_to_cubeface(const Vec3& d);

CubeMap equirect_to_cubemap(const EquirectGrid& src, int faceRes);
EquirectGrid cubemap_to_equirect(const CubeMap& src, const GridDims& dims);

// --- gnomonic windows ----------------------------------------------------------

// Rectilinear window on the sphere. fov < 180 in both axes. resolution is the
// pixel count per side of the sampled square patch.
struct GnomonicWindow {
    SphericalDir center;
    double fovLonDeg = 90;
    double fovLatDeg = 90;
    int resolution = 64;
};

// Local tangent frame of a window: forward, image-right (increasing lon at the
// center), image-up (increasing lat). At the poles the frame is oriented by the
// center's lon field, which keeps the layout deterministic.
struct TangentFrame {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};
TangentFrame tangent_frame(const SphericalDir& center);

// Ray for normalized window coordinates u,v in [-1,1] (u right, v up).
Vec3 gnomonic_ray(const GnomonicWindow& w, double u, double v);
// Inverse: normalized window coordinates of d, or nullopt when d is outside the
// window (or behind the tangent plane).
std::optional<std::pair<double, double>> gnomonic_project(const GnomonicWindow& w, const Vec3& d);

struct GnomonicPatch {
    Image image;                      // resolution x resolution
    std::vector<Vec3> rays;           // per-pixel center rays, row-major
    GnomonicWindow window;
};

// Gnomonic (rectilinear) resampling of the panorama about w.center.
GnomonicPatch gnomonic_sample(const EquirectGrid& src, const GnomonicWindow& w);

// Windows of the given fov whose union covers the sphere. Every direction is
// guaranteed to lie within (fov - overlap)/2 degrees of some window center,
// which keeps it strictly inside that window. The layout is dyadic so that a
// larger overlap always produces a superset of centers.
std::vector<GnomonicWindow> patch_centers(double fovDeg, double overlapDeg, int resolution = 64);

}  // namespace vrsal
