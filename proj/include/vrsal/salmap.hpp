// Saliency maps on the equirectangular sphere: accumulation, spherical
// Gaussian blur, normalization, entropy, and salient-region masks.
#pragma once

#include "vrsal/sphere.hpp"
#include "vrsal/trajectory.hpp"

#include <span>
#include <vector>

namespace vrsal {

enum class Normalization { RawCounts, SumOne, SqSumOne, MaxOne };
std::string normalization_name(Normalization n);
Normalization parse_normalization(const std::string& name);

// Non-negative scalar field over the full sphere. The declared normalization is
// validated (1e-6 relative) at construction.
class SaliencyMap {
public:
    SaliencyMap() = default;
    SaliencyMap(EquirectGrid grid, Normalization norm);

    int width() const { return grid_.width(); }
    int height() const { return grid_.height(); }
    GridDims dims() const { return grid_.dims(); }
    bool empty() const { return grid_.empty(); }
    Normalization normalization() const { return norm_; }

    float at(int x, int y) const { return grid_.at(x, y); }
    const EquirectGrid& grid() const { return grid_; }

private:
    EquirectGrid grid_;
    Normalization norm_ = Normalization::RawCounts;
};

struct SalientMask {
    int width = 0, height = 0;
    std::vector<uint8_t> mask;  // row-major, 1 = salient
    double coverage = 0;        // true-pixel fraction

    bool contains(const PixelCoord& p) const { return mask[std::size_t(p.y) * width + p.x] != 0; }
    std::size_t count() const;
};

// Integer fixation-centroid counts; sum equals the number of fixations.
SaliencyMap accumulate_fixations(std::span<const Fixation> fixations, const GridDims& dims);

// Isotropic spherical Gaussian exp(-theta^2 / 2 sigma^2) over great-circle
// angle theta, evaluated as banded per-row-pair circular convolution with true
// spherical distances (truncated at 4 sigma, renormalized per source row so
// total mass is conserved). Wide kernels run on a 2^k-downsampled working grid.
// Keeps a RawCounts/SumOne tag (mass is preserved); other tags degrade to
// RawCounts since blurring invalidates them.
SaliencyMap spherical_blur(const SaliencyMap& m, double sigmaDeg = 1.0);

// Rescale to the requested normalization; pixel ordering is unchanged.
// Throws on an all-zero map.
SaliencyMap normalize(const SaliencyMap& m, Normalization mode);

// -sum s_i^2 ln(s_i^2) with the map brought to sq-sum-one first (0 ln 0 := 0).
double entropy(const SaliencyMap& m);

// Mask of the ceil(N * topPercent / 100) highest-valued pixels; ties broken by
// pixel index order (row-major).
SalientMask salient_mask(const SaliencyMap& m, double topPercent = 5);

// Per-pixel mean of the sum-one-normalized inputs.
SaliencyMap mean_map(std::span<const SaliencyMap> maps);

// Pixel ranking shared by salient_mask and the congruency ROC: indices sorted
// by (value descending, pixel index ascending).
std::vector<int> saliency_rank_order(const SaliencyMap& m);

}  // namespace vrsal
