#include "vrsal/salmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vrsal {

std::string normalization_name(Normalization n) {
    switch (n) {
        case Normalization::RawCounts: return "raw-counts";
        case Normalization::SumOne: return "sum-one";
        case Normalization::SqSumOne: return "sq-sum-one";
        case Normalization::MaxOne: return "max-one";
    }
    throw Error("normalization_name: bad tag");
}

Normalization parse_normalization(const std::string& name) {
    if (name == "raw-counts") return Normalization::RawCounts;
    if (name == "sum-one") return Normalization::SumOne;
    if (name == "sq-sum-one") return Normalization::SqSumOne;
    if (name == "max-one") return Normalization::MaxOne;
    throw Error("unknown normalization tag '" + name + "'");
}

SaliencyMap::SaliencyMap(EquirectGrid grid, Normalization norm) : grid_(std::move(grid)), norm_(norm) {
    if (grid_.channels() != 1) throw Error("SaliencyMap: grid must be single-channel");
    double sum = 0, sqSum = 0, maxV = 0;
    for (float v : grid_.image().data) {
        if (v < 0) throw Error("SaliencyMap: negative value " + std::to_string(v));
        sum += v;
        sqSum += double(v) * v;
        maxV = std::max(maxV, double(v));
    }
    auto close = [](double v) { return std::fabs(v - 1.0) <= 1e-6; };
    switch (norm_) {
        case Normalization::RawCounts: break;
        case Normalization::SumOne:
            if (!close(sum)) throw Error("SaliencyMap: sum-one tag but sum = " + std::to_string(sum));
            break;
        case Normalization::SqSumOne:
            if (!close(sqSum))
                throw Error("SaliencyMap: sq-sum-one tag but sq-sum = " + std::to_string(sqSum));
            break;
        case Normalization::MaxOne:
            if (!close(maxV)) throw Error("SaliencyMap: max-one tag but max = " + std::to_string(maxV));
            break;
    }
}

std::size_t SalientMask::count() const {
    return std::size_t(std::count(mask.begin(), mask.end(), uint8_t(1)));
}

SaliencyMap accumulate_fixations(std::span<const Fixation> fixations, const GridDims& dims) {
    EquirectGrid grid(dims.width, dims.height, 1);
    for (const Fixation& f : fixations) {
        const PixelCoord p = dir_to_pixel(f.centroid, dims);
        grid.at(p.x, p.y) += 1.0f;
    }
    return SaliencyMap(std::move(grid), Normalization::RawCounts);
}

// --- spherical blur -------------------------------------------------------------------

namespace {

// Kernel row between destination row latitude latP and source row latitude
// latQ: values exp(-d^2 / 2 sigma^2) for column offsets 0..maxd, where d is the
// true great-circle distance. d is monotone in the offset, so the 4-sigma
// truncation is a prefix.
std::vector<double> kernel_row(double latP, double latQ, int W, double sigmaDeg) {
    const double sp = std::sin(deg2rad(latP)), cp = std::cos(deg2rad(latP));
    const double sq = std::sin(deg2rad(latQ)), cq = std::cos(deg2rad(latQ));
    const double cutoff = 4.0 * sigmaDeg;
    const int half = W / 2;
    std::vector<double> k;
    k.reserve(16);
    for (int d = 0; d <= half; ++d) {
        const double dLonR = deg2rad(d * 360.0 / W);
        const double cosDist = std::clamp(sp * sq + cp * cq * std::cos(dLonR), -1.0, 1.0);
        const double dist = rad2deg(std::acos(cosDist));
        if (dist > cutoff) break;
        k.push_back(std::exp(-dist * dist / (2.0 * sigmaDeg * sigmaDeg)));
    }
    return k;
}

Image blur_grid(const Image& in, double sigmaDeg) {
    const int W = in.width, H = in.height;
    const double pixLat = 180.0 / H;
    const int band = int(std::ceil(4.0 * sigmaDeg / pixLat)) + 1;
    std::vector<double> lat(H);
    for (int r = 0; r < H; ++r) lat[r] = 90.0 - (r + 0.5) * pixLat;

    std::vector<bool> rowNonZero(H, false);
    for (int r = 0; r < H; ++r)
        for (int x = 0; x < W; ++x)
            if (in.at(x, r) != 0.0f) {
                rowNonZero[r] = true;
                break;
            }

    // Per-source-row normalizer over every destination tap the kernel reaches.
    std::vector<double> nu(H, 0.0);
    for (int q = 0; q < H; ++q) {
        if (!rowNonZero[q]) continue;
        for (int p = std::max(0, q - band); p <= std::min(H - 1, q + band); ++p) {
            const auto k = kernel_row(lat[p], lat[q], W, sigmaDeg);
            if (k.empty()) continue;
            double s = k[0];
            for (std::size_t d = 1; d < k.size(); ++d) s += k[d] * ((int(d) == W / 2) ? 1.0 : 2.0);
            nu[q] += s;
        }
    }

    Image out(W, H, 1);
    std::vector<double> acc(W);
    for (int p = 0; p < H; ++p) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int q = std::max(0, p - band); q <= std::min(H - 1, p + band); ++q) {
            if (!rowNonZero[q]) continue;
            const auto k = kernel_row(lat[p], lat[q], W, sigmaDeg);
            if (k.empty()) continue;
            const double invNu = 1.0 / nu[q];
            const float* row = &in.data[std::size_t(q) * W];
            const int maxd = int(k.size()) - 1;
            for (int x = 0; x < W; ++x) {
                double v = k[0] * row[x];
                for (int d = 1; d <= maxd; ++d) {
                    const int xl = (x - d + W) % W;
                    const int xr = (x + d) % W;
                    v += (d == W / 2) ? k[d] * row[xr] : k[d] * (double(row[xl]) + row[xr]);
                }
                acc[x] += v * invNu;
            }
        }
        for (int x = 0; x < W; ++x) out.at(x, p) = float(acc[x]);
    }
    return out;
}

Image box_halve(const Image& in) {
    Image out(in.width / 2, in.height / 2, 1);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = in.at(2 * x, 2 * y) + in.at(2 * x + 1, 2 * y) + in.at(2 * x, 2 * y + 1) +
                           in.at(2 * x + 1, 2 * y + 1);
    return out;
}

}  // namespace

SaliencyMap spherical_blur(const SaliencyMap& m, double sigmaDeg) {
    if (sigmaDeg <= 0) throw Error("spherical_blur: sigma must be positive");
    if (m.empty()) throw Error("spherical_blur: empty map");

    const Image& src = m.grid().image();
    const double totalIn = src.sum();

    // Wide kernels run on a halved working grid; halving stops once it would
    // push sigma under ~6 work pixels (keeps peak positions within a fraction
    // of a degree after upsampling).
    Image work = src;
    int factor = 1;
    while (work.height % 2 == 0 && work.height / 2 >= 64 &&
           sigmaDeg >= 6.0 * (180.0 / (work.height / 2))) {
        work = box_halve(work);
        factor *= 2;
    }

    Image blurred = blur_grid(work, sigmaDeg);
    if (factor > 1) blurred = resize_bilinear(blurred, src.width, src.height);

    // Rescale so the total mass matches the input exactly.
    const double totalOut = blurred.sum();
    if (totalOut > 0) {
        const double s = totalIn / totalOut;
        for (float& v : blurred.data) v = float(std::max(0.0, double(v) * s));
    }

    const Normalization tag = (m.normalization() == Normalization::SumOne) ? Normalization::SumOne
                                                                           : Normalization::RawCounts;
    return SaliencyMap(EquirectGrid(std::move(blurred)), tag);
}

SaliencyMap normalize(const SaliencyMap& m, Normalization mode) {
    if (m.empty()) throw Error("normalize: empty map");
    if (mode == Normalization::RawCounts) return SaliencyMap(m.grid(), Normalization::RawCounts);

    const Image& img = m.grid().image();
    double sum = 0, sqSum = 0, maxV = 0;
    for (float v : img.data) {
        sum += v;
        sqSum += double(v) * v;
        maxV = std::max(maxV, double(v));
    }
    double factor = 0;
    switch (mode) {
        case Normalization::SumOne: factor = sum; break;
        case Normalization::SqSumOne: factor = std::sqrt(sqSum); break;
        case Normalization::MaxOne: factor = maxV; break;
        default: break;
    }
    if (factor <= 0) throw Error("normalize: all-zero map");
    Image out = img;
    for (float& v : out.data) v = float(v / factor);
    return SaliencyMap(EquirectGrid(std::move(out)), mode);
}

double entropy(const SaliencyMap& m) {
    if (m.empty()) throw Error("entropy: empty map");
    const Image& img = m.grid().image();
    double sqSum = 0;
    for (float v : img.data) sqSum += double(v) * v;
    if (sqSum <= 0) throw Error("entropy: all-zero map");
    double h = 0;
    for (float v : img.data) {
        const double p = double(v) * v / sqSum;
        if (p > 0) h -= p * std::log(p);
    }
    return h;
}

std::vector<int> saliency_rank_order(const SaliencyMap& m) {
    const Image& img = m.grid().image();
    std::vector<int> order(img.data.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (img.data[a] != img.data[b]) return img.data[a] > img.data[b];
        return a < b;
    });
    return order;
}

SalientMask salient_mask(const SaliencyMap& m, double topPercent) {
    if (!(topPercent > 0 && topPercent <= 100))
        throw Error("salient_mask: topPercent must lie in (0, 100], got " + std::to_string(topPercent));
    const std::size_t n = m.grid().image().data.size();
    const std::size_t k = std::size_t(std::ceil(n * topPercent / 100.0 - 1e-12));
    const auto order = saliency_rank_order(m);
    SalientMask out;
    out.width = m.width();
    out.height = m.height();
    out.mask.assign(n, 0);
    for (std::size_t i = 0; i < k; ++i) out.mask[order[i]] = 1;
    out.coverage = double(k) / double(n);
    return out;
}

SaliencyMap mean_map(std::span<const SaliencyMap> maps) {
    if (maps.empty()) throw Error("mean_map: needs at least one map");
    const GridDims dims = maps.front().dims();
    std::vector<double> acc(std::size_t(dims.width) * dims.height, 0.0);
    for (const SaliencyMap& m : maps) {
        if (m.dims() != dims)
            throw Error("mean_map: dimension mismatch (" + std::to_string(m.width()) + "x" +
                        std::to_string(m.height()) + " vs " + std::to_string(dims.width) + "x" +
                        std::to_string(dims.height) + ")");
        const SaliencyMap norm = normalize(m, Normalization::SumOne);
        const auto& data = norm.grid().image().data;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += data[i];
    }
    Image out(dims.width, dims.height, 1);
    const double inv = 1.0 / double(maps.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = float(acc[i] * inv);
    return SaliencyMap(EquirectGrid(std::move(out)), Normalization::SumOne);
}

}  // namespace vrsal
