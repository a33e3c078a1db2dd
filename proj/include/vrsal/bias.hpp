// Latitudinal equator bias: Laplace fit over the latitude marginal of a
// saliency map, and its application to predicted maps.
#pragma once

#include "vrsal/salmap.hpp"

#include <span>
#include <string>
#include <vector>

namespace vrsal {

struct EquatorBias {
    double muDeg = 0;    // location
    double betaDeg = 15; // diversity, > 0
};
void validate_bias(const EquatorBias& b);

// Laplace density f(lat; mu, beta) = exp(-|lat - mu| / beta) / (2 beta).
double laplace_pdf(double latDeg, const EquatorBias& b);

// Latitude bin centers of an equirect grid, row 0 first (descending latitude).
std::vector<double> row_latitudes(int height);

// Row sums normalized into a probability vector over latitude bins.
// Throws on an all-zero map.
std::vector<double> lat_marginal(const SaliencyMap& m);

struct LaplaceFit {
    EquatorBias bias;
    bool degenerateClamped = false;  // single-bin profile: beta clamped to one bin width
};

// Weighted maximum-likelihood fit: mu = weighted median (interpolated within
// the bin), beta = weighted mean absolute deviation about mu.
LaplaceFit fit_laplace(std::span<const double> profile, std::span<const double> binLatsDeg);

// Multiply each row by the Laplace density at its latitude, then renormalize
// to sum-one. Within-row ordering is unchanged.
SaliencyMap apply_equator_bias(const SaliencyMap& m, const EquatorBias& b);

// Two-field text record ("mu_deg: <v>\nbeta_deg: <v>\n").
EquatorBias load_bias(const std::string& path);
void save_bias(const std::string& path, const EquatorBias& b);

}  // namespace vrsal
