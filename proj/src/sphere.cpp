#include "vrsal/sphere.hpp"

#include <algorithm>
#include <cmath>

namespace vrsal {

double wrap_lon(double lonDeg) {
    double x = std::fmod(lonDeg + 180.0, 360.0);
    if (x < 0) x += 360.0;
    return x - 180.0;
}

double lon_diff(double aDeg, double bDeg) { return wrap_lon(aDeg - bDeg); }

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    if (n == 0) throw Error("normalized: zero vector");
    return a * (1.0 / n);
}

SphericalDir::SphericalDir(double latDeg, double lonDeg) {
    if (!(latDeg >= -90.0 - 1e-9 && latDeg <= 90.0 + 1e-9) || !std::isfinite(lonDeg))
        throw Error("SphericalDir: invalid angles lat=" + std::to_string(latDeg) +
                    " lon=" + std::to_string(lonDeg));
    lat = std::clamp(latDeg, -90.0, 90.0);
    lon = wrap_lon(lonDeg);
}

Vec3 to_unit(const SphericalDir& d) {
    const double latR = deg2rad(d.lat);
    const double lonR = deg2rad(d.lon);
    return {std::cos(latR) * std::cos(lonR), std::cos(latR) * std::sin(lonR), std::sin(latR)};
}

SphericalDir to_spherical(const Vec3& v) {
    const double n = norm(v);
    if (n == 0) throw Error("to_spherical: zero vector");
    const double lat = rad2deg(std::asin(std::clamp(v.z / n, -1.0, 1.0)));
    const double lon = (v.x == 0 && v.y == 0) ? 0.0 : rad2deg(std::atan2(v.y, v.x));
    return SphericalDir(lat, lon);
}

double angular_distance(const Vec3& a, const Vec3& b) {
    // atan2 form stays accurate for both near-parallel and near-antipodal pairs.
    return rad2deg(std::atan2(norm(cross(a, b)), dot(a, b)));
}

double angular_distance(const SphericalDir& a, const SphericalDir& b) {
    return angular_distance(to_unit(a), to_unit(b));
}

// --- equirectangular grid -----------------------------------------------------

EquirectGrid::EquirectGrid(int width, int height, int channels, float fill)
    : img_(width, height, channels, fill) {
    if (width != 2 * height || height < 1)
        throw Error("EquirectGrid: width must equal 2*height, got " + std::to_string(width) + "x" +
                    std::to_string(height));
}

EquirectGrid::EquirectGrid(Image img) : img_(std::move(img)) {
    if (img_.width != 2 * img_.height || img_.height < 1)
        throw Error("EquirectGrid: width must equal 2*height, got " + std::to_string(img_.width) +
                    "x" + std::to_string(img_.height));
    img_.check_finite("EquirectGrid");
}

SphericalDir pixel_to_dir(const PixelCoord& p, const GridDims& g) {
    if (p.x < 0 || p.x >= g.width || p.y < 0 || p.y >= g.height)
        throw Error("pixel_to_dir: pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                    ") outside " + std::to_string(g.width) + "x" + std::to_string(g.height));
    const double lon = -180.0 + (p.x + 0.5) * 360.0 / g.width;
    const double lat = 90.0 - (p.y + 0.5) * 180.0 / g.height;
    return SphericalDir(lat, lon);
}

PixelCoord dir_to_pixel(const SphericalDir& d, const GridDims& g) {
    // Continuous pixel coordinates where integers land on pixel centers.
    const double u = (d.lon + 180.0) / 360.0 * g.width - 0.5;
    const double v = (90.0 - d.lat) / 180.0 * g.height - 0.5;
    int x = int(std::ceil(u - 0.5));  // nearest pixel, boundary ties to the lower index
    int y = int(std::ceil(v - 0.5));
    x %= g.width;
    if (x < 0) x += g.width;
    y = std::clamp(y, 0, g.height - 1);
    return {x, y};
}

float EquirectGrid::sample(const SphericalDir& d, int c) const {
    const int W = width();
    const int H = height();
    const double px = (d.lon + 180.0) / 360.0 * W - 0.5;
    const double py = std::clamp((90.0 - d.lat) / 180.0 * H - 0.5, 0.0, double(H - 1));
    int x0 = int(std::floor(px));
    const double fx = px - x0;
    int x1 = x0 + 1;
    x0 = ((x0 % W) + W) % W;
    x1 = ((x1 % W) + W) % W;
    const int y0 = int(py);
    const int y1 = std::min(y0 + 1, H - 1);
    const double fy = py - y0;
    const float top = lerp(at(x0, y0, c), at(x1, y0, c), fx);
    const float bot = lerp(at(x0, y1, c), at(x1, y1, c), fx);
    return lerp(top, bot, fy);
}

EquirectGrid rotate_columns(const EquirectGrid& src, int columns) {
    const int W = src.width();
    EquirectGrid out(src.width(), src.height(), src.channels());
    const int shift = ((columns % W) + W) % W;
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < src.channels(); ++c)
                out.at((x + shift) % W, y, c) = src.at(x, y, c);
    return out;
}

// --- cube map -------------------------------------------------------------------

FaceFrame face_frame(CubeFace f) {
    switch (f) {
        case CubeFace::PosX: return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        case CubeFace::NegX: return {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
        case CubeFace::PosY: return {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}};
        case CubeFace::NegY: return {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}};
        case CubeFace::PosZ: return {{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}};
        case CubeFace::NegZ: return {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}};
    }
    throw Error("face_frame: bad face");
}

CubeMap::CubeMap(int faceRes, int channels, float fill) : faceRes_(faceRes), channels_(channels) {
    if (faceRes < 1) throw Error("CubeMap: faceRes must be >= 1");
    for (auto& f : faces_) f = Image(faceRes, faceRes, channels, fill);
}

Vec3 cubeface_pixel_dir(CubeFace f, int ix, int iy, int faceRes) {
    const double s = 2.0 * (ix + 0.5) / faceRes - 1.0;
    const double t = 2.0 * (iy + 0.5) / faceRes - 1.0;
    const FaceFrame fr = face_frame(f);
    return normalized(fr.normal + fr.right * s - fr.up * t);
}

CubeCoord dir_to_cubeface(const Vec3& d) {
    int best = 0;
    double bestDot = -2;
    for (int i = 0; i < kNumCubeFaces; ++i) {
        const double k = dot(d, face_frame(CubeFace(i)).normal);
        if (k > bestDot) {
            bestDot = k;
            best = i;
        }
    }
    const FaceFrame fr = face_frame(CubeFace(best));
    const double k = dot(d, fr.normal);
    return {CubeFace(best), dot(d, fr.right) / k, -dot(d, fr.up) / k};
}

CubeMap equirect_to_cubemap(const EquirectGrid& src, int faceRes) {
    if (faceRes < 1) throw Error("equirect_to_cubemap: faceRes must be >= 1");
    CubeMap out(faceRes, src.channels());
    for (int fi = 0; fi < kNumCubeFaces; ++fi) {
        Image& face = out.face(CubeFace(fi));
        for (int y = 0; y < faceRes; ++y)
            for (int x = 0; x < faceRes; ++x) {
                const SphericalDir d = to_spherical(cubeface_pixel_dir(CubeFace(fi), x, y, faceRes));
                for (int c = 0; c < src.channels(); ++c) face.at(x, y, c) = src.sample(d, c);
            }
    }
    return out;
}

EquirectGrid cubemap_to_equirect(const CubeMap& src, const GridDims& dims) {
    EquirectGrid out(dims.width, dims.height, src.channels());
    const int res = src.face_res();
    for (int y = 0; y < dims.height; ++y)
        for (int x = 0; x < dims.width; ++x) {
            const Vec3 d = to_unit(pixel_to_dir({x, y}, dims));
            const CubeCoord cc = dir_to_cubeface(d);
            const double px = (cc.s + 1.0) * 0.5 * res - 0.5;
            const double py = (cc.t + 1.0) * 0.5 * res - 0.5;
            const Image& face = src.face(cc.face);
            for (int c = 0; c < src.channels(); ++c)
                out.at(x, y, c) = face.sample_clamped(px, py, c);
        }
    return out;
}

// --- gnomonic windows -------------------------------------------------------------

TangentFrame tangent_frame(const SphericalDir& center) {
    const Vec3 f = to_unit(center);
    const double lonR = deg2rad(center.lon);
    const Vec3 r{-std::sin(lonR), std::cos(lonR), 0.0};  // z x f, valid at the poles too
    return {f, r, cross(f, r)};
}

static void check_window(const GnomonicWindow& w) {
    if (!(w.fovLonDeg > 0 && w.fovLonDeg < 180 && w.fovLatDeg > 0 && w.fovLatDeg < 180))
        throw Error("GnomonicWindow: fov must lie in (0, 180), got " + std::to_string(w.fovLonDeg) +
                    "x" + std::to_string(w.fovLatDeg));
    if (w.resolution < 1) throw Error("GnomonicWindow: resolution must be >= 1");
}

Vec3 gnomonic_ray(const GnomonicWindow& w, double u, double v) {
    check_window(w);
    const TangentFrame fr = tangent_frame(w.center);
    const double x = u * std::tan(deg2rad(w.fovLonDeg / 2));
    const double y = v * std::tan(deg2rad(w.fovLatDeg / 2));
    return normalized(fr.forward + fr.right * x + fr.up * y);
}

std::optional<std::pair<double, double>> gnomonic_project(const GnomonicWindow& w, const Vec3& d) {
    check_window(w);
    const TangentFrame fr = tangent_frame(w.center);
    const double k = dot(d, fr.forward);
    if (k <= 0) return std::nullopt;
    const double u = dot(d, fr.right) / k / std::tan(deg2rad(w.fovLonDeg / 2));
    const double v = dot(d, fr.up) / k / std::tan(deg2rad(w.fovLatDeg / 2));
    if (std::fabs(u) > 1.0 || std::fabs(v) > 1.0) return std::nullopt;
    return std::make_pair(u, v);
}

GnomonicPatch gnomonic_sample(const EquirectGrid& src, const GnomonicWindow& w) {
    check_window(w);
    const int res = w.resolution;
    GnomonicPatch out;
    out.window = w;
    out.image = Image(res, res, src.channels());
    out.rays.resize(std::size_t(res) * res);
    const TangentFrame fr = tangent_frame(w.center);
    const double tx = std::tan(deg2rad(w.fovLonDeg / 2));
    const double ty = std::tan(deg2rad(w.fovLatDeg / 2));
    for (int j = 0; j < res; ++j) {
        const double v = 1.0 - 2.0 * (j + 0.5) / res;  // row 0 is the +lat side
        for (int i = 0; i < res; ++i) {
            const double u = 2.0 * (i + 0.5) / res - 1.0;
            const Vec3 ray = normalized(fr.forward + fr.right * (u * tx) + fr.up * (v * ty));
            out.rays[std::size_t(j) * res + i] = ray;
            const SphericalDir d = to_spherical(ray);
            for (int c = 0; c < src.channels(); ++c) out.image.at(i, j, c) = src.sample(d, c);
        }
    }
    return out;
}

// Dyadic covering layout. Density level D places rings at latitude multiples of
// 180/2^D; a ring at latitude L carries longitudes at multiples of
// 360/2^(D + s(L)) with s(L) = ceil(log2(1/cos|L|)). Raising D only refines the
// layout (strict superset), so a larger overlap never drops a window — that
// keeps per-direction cover counts monotone in the overlap.
namespace {

int ring_extra_level(double latDeg) {
    const double c = std::cos(deg2rad(std::fabs(latDeg)));
    if (c <= 0) return 0;  // pole rings hold a single window
    return std::max(0, int(std::ceil(std::log2(1.0 / c) - 1e-12)));
}

bool cell_inside_window(double ringLat, double halfBandDeg, double halfLonDeg, double fovEffDeg) {
    const GnomonicWindow w{SphericalDir(ringLat, 0.0), fovEffDeg, fovEffDeg, 1};
    const double margin = 1e-9;
    for (double dl : {-halfBandDeg, halfBandDeg}) {
        const double lat = std::clamp(ringLat + dl, -90.0, 90.0);
        for (double lon : {halfLonDeg, halfLonDeg * 0.5}) {
            const auto uv = gnomonic_project(w, to_unit(SphericalDir(lat, lon)));
            if (!uv) return false;
            if (std::fabs(uv->first) > 1.0 - margin || std::fabs(uv->second) > 1.0 - margin)
                return false;
        }
    }
    return true;
}

bool level_covers(int D, double fovEffDeg) {
    const double halfBand = 90.0 / double(1 << D);
    const int nRings = (1 << D) + 1;
    for (int j = 0; j < nRings; ++j) {
        const double lat = -90.0 + j * (180.0 / double(1 << D));
        if (std::fabs(lat) >= 90.0 - 1e-12) {
            // Pole cell: a cap of radius halfBand. Check the two worst azimuths.
            const GnomonicWindow w{SphericalDir(lat, 0.0), fovEffDeg, fovEffDeg, 1};
            const double edgeLat = (lat > 0) ? lat - halfBand : lat + halfBand;
            for (double lon : {0.0, 45.0}) {
                const auto uv = gnomonic_project(w, to_unit(SphericalDir(edgeLat, lon)));
                if (!uv || std::fabs(uv->first) > 1.0 - 1e-9 || std::fabs(uv->second) > 1.0 - 1e-9)
                    return false;
            }
            continue;
        }
        const int q = D + ring_extra_level(lat);
        const double halfLon = 180.0 / double(1 << q);
        if (!cell_inside_window(lat, halfBand, halfLon, fovEffDeg)) return false;
    }
    return true;
}

}  // namespace

std::vector<GnomonicWindow> patch_centers(double fovDeg, double overlapDeg, int resolution) {
    if (!(fovDeg > 0 && fovDeg < 180))
        throw Error("patch_centers: fov must lie in (0, 180), got " + std::to_string(fovDeg));
    if (!(overlapDeg >= 0 && overlapDeg < fovDeg))
        throw Error("patch_centers: infeasible overlap " + std::to_string(overlapDeg) +
                    " for fov " + std::to_string(fovDeg));
    const double fovEff = fovDeg - overlapDeg;

    constexpr int kMaxLevel = 12;
    int D = 0;
    while (D < kMaxLevel && !level_covers(D, fovEff)) ++D;
    if (D == kMaxLevel) throw Error("patch_centers: no covering layout found (fov too small?)");

    std::vector<GnomonicWindow> out;
    const int nRings = (1 << D) + 1;
    for (int j = 0; j < nRings; ++j) {
        const double lat = -90.0 + j * (180.0 / double(1 << D));
        if (std::fabs(lat) >= 90.0 - 1e-12) {
            out.push_back({SphericalDir(lat, 0.0), fovDeg, fovDeg, resolution});
            continue;
        }
        const int q = D + ring_extra_level(lat);
        const int n = 1 << q;
        for (int i = 0; i < n; ++i)
            out.push_back({SphericalDir(lat, -180.0 + i * 360.0 / n), fovDeg, fovDeg, resolution});
    }
    return out;
}

}  // namespace vrsal
