#include "vrsal/bias.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace vrsal {

void validate_bias(const EquatorBias& b) {
    if (!(b.betaDeg > 0)) throw Error("EquatorBias: beta must be positive");
    if (!(std::fabs(b.muDeg) <= 90)) throw Error("EquatorBias: |mu| must be <= 90");
}

double laplace_pdf(double latDeg, const EquatorBias& b) {
    return std::exp(-std::fabs(latDeg - b.muDeg) / b.betaDeg) / (2.0 * b.betaDeg);
}

std::vector<double> row_latitudes(int height) {
    std::vector<double> lats(height);
    for (int r = 0; r < height; ++r) lats[r] = 90.0 - (r + 0.5) * 180.0 / height;
    return lats;
}

std::vector<double> lat_marginal(const SaliencyMap& m) {
    if (m.empty()) throw Error("lat_marginal: empty map");
    const int W = m.width(), H = m.height();
    std::vector<double> profile(H, 0.0);
    double total = 0;
    for (int r = 0; r < H; ++r) {
        double s = 0;
        for (int x = 0; x < W; ++x) s += m.at(x, r);
        profile[r] = s;
        total += s;
    }
    if (total <= 0) throw Error("lat_marginal: all-zero map");
    for (double& v : profile) v /= total;
    return profile;
}

LaplaceFit fit_laplace(std::span<const double> profile, std::span<const double> binLatsDeg) {
    if (profile.size() != binLatsDeg.size() || profile.empty())
        throw Error("fit_laplace: profile and bin latitudes must match and be non-empty");
    double total = 0;
    for (double w : profile) {
        if (w < 0) throw Error("fit_laplace: negative weight");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-6) throw Error("fit_laplace: profile must sum to one");

    // Sort bins by latitude; bins are treated as intervals of the grid spacing
    // so the median interpolates inside its bin.
    std::vector<std::size_t> order(profile.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return binLatsDeg[a] < binLatsDeg[b]; });

    double binWidth = 180.0 / double(profile.size());
    if (profile.size() > 1)
        binWidth = (binLatsDeg[order[1]] - binLatsDeg[order[0]]);

    // Weighted median with within-bin interpolation.
    double mu = binLatsDeg[order.back()];
    double cum = 0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const double w = profile[order[oi]];
        if (cum + w >= 0.5 - 1e-15) {
            const double lo = binLatsDeg[order[oi]] - binWidth / 2.0;
            mu = (w > 0) ? lo + (0.5 - cum) / w * binWidth : binLatsDeg[order[oi]];
            break;
        }
        cum += w;
    }

    // Weighted mean absolute deviation about mu.
    double beta = 0;
    int nonZeroBins = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        beta += profile[i] * std::fabs(binLatsDeg[i] - mu);
        if (profile[i] > 0) ++nonZeroBins;
    }

    LaplaceFit fit;
    if (nonZeroBins <= 1 || beta < binWidth * 1e-9) {
        fit.bias = {std::clamp(mu, -90.0, 90.0), binWidth};
        fit.degenerateClamped = true;
    } else {
        fit.bias = {std::clamp(mu, -90.0, 90.0), beta};
    }
    return fit;
}

SaliencyMap apply_equator_bias(const SaliencyMap& m, const EquatorBias& b) {
    validate_bias(b);
    if (m.empty()) throw Error("apply_equator_bias: empty map");
    const int W = m.width(), H = m.height();
    const auto lats = row_latitudes(H);
    Image out(W, H, 1);
    double total = 0;
    for (int r = 0; r < H; ++r) {
        const double f = laplace_pdf(lats[r], b);
        for (int x = 0; x < W; ++x) {
            const double v = double(m.at(x, r)) * f;
            out.at(x, r) = float(v);
            total += v;
        }
    }
    if (total <= 0) throw Error("apply_equator_bias: map has no mass");
    for (float& v : out.data) v = float(v / total);
    return SaliencyMap(EquirectGrid(std::move(out)), Normalization::SumOne);
}

EquatorBias load_bias(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_bias: cannot open " + path);
    EquatorBias b;
    std::string key;
    bool muSeen = false, betaSeen = false;
    while (in >> key) {
        if (key == "mu_deg:") {
            in >> b.muDeg;
            muSeen = true;
        } else if (key == "beta_deg:") {
            in >> b.betaDeg;
            betaSeen = true;
        } else {
            throw Error("load_bias: unexpected field '" + key + "' in " + path);
        }
    }
    if (!muSeen || !betaSeen) throw Error("load_bias: missing mu_deg/beta_deg in " + path);
    validate_bias(b);
    return b;
}

void save_bias(const std::string& path, const EquatorBias& b) {
    validate_bias(b);
    std::ofstream out(path);
    if (!out) throw Error("save_bias: cannot open " + path);
    out.precision(17);
    out << "mu_deg: " << b.muDeg << "\nbeta_deg: " << b.betaDeg << "\n";
}

}  // namespace vrsal
