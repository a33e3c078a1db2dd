#include <doctest.h>

#include "vrsal/salmap.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

using namespace vrsal;

namespace {

SaliencyMap random_map(int W, int H, uint64_t seed, Normalization norm = Normalization::RawCounts) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    EquirectGrid g(W, H, 1);
    for (float& v : g.image().data) v = u(rng);
    SaliencyMap m(std::move(g), Normalization::RawCounts);
    return (norm == Normalization::RawCounts) ? m : normalize(m, norm);
}

// Brute-force spherical Gaussian scatter with the untruncated true kernel:
// out(p) = sum_q m(q) k(theta(p,q)) / nu(q), nu(q) = sum_p k(theta(p,q)).
SaliencyMap blur_oracle(const SaliencyMap& m, double sigmaDeg) {
    const int W = m.width(), H = m.height();
    std::vector<Vec3> dirs(std::size_t(W) * H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            dirs[std::size_t(y) * W + x] = to_unit(pixel_to_dir({x, y}, {W, H}));

    std::vector<double> acc(dirs.size(), 0.0);
    for (std::size_t q = 0; q < dirs.size(); ++q) {
        const double mass = m.grid().image().data[q];
        if (mass == 0) continue;
        std::vector<double> k(dirs.size());
        double nu = 0;
        for (std::size_t p = 0; p < dirs.size(); ++p) {
            const double theta = angular_distance(dirs[p], dirs[q]);
            k[p] = std::exp(-theta * theta / (2.0 * sigmaDeg * sigmaDeg));
            nu += k[p];
        }
        for (std::size_t p = 0; p < dirs.size(); ++p) acc[p] += mass * k[p] / nu;
    }
    Image out(W, H, 1);
    for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = float(acc[i]);
    return SaliencyMap(EquirectGrid(std::move(out)), Normalization::RawCounts);
}

std::vector<Fixation> fix_at(std::initializer_list<SphericalDir> dirs) {
    std::vector<Fixation> out;
    double t = 0;
    for (const SphericalDir& d : dirs) {
        out.push_back({t, 200, d});
        t += 300;
    }
    return out;
}

}  // namespace

TEST_CASE("accumulate_fixations counts centroids per pixel") {
    const GridDims dims{64, 32};
    {
        const auto m = accumulate_fixations(fix_at({SphericalDir(10, 40)}), dims);
        int nonzero = 0;
        double sum = 0;
        for (float v : m.grid().image().data) {
            if (v != 0) ++nonzero;
            sum += v;
        }
        CHECK(nonzero == 1);
        CHECK(sum == doctest::Approx(1.0));
    }
    {
        const auto m = accumulate_fixations(fix_at({SphericalDir(10, 40), SphericalDir(10, 40)}), dims);
        const PixelCoord p = dir_to_pixel(SphericalDir(10, 40), dims);
        CHECK(m.at(p.x, p.y) == doctest::Approx(2.0));
    }
    {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> ulat(-89, 89), ulon(-180, 180);
        std::vector<Fixation> fx;
        for (int i = 0; i < 137; ++i)
            fx.push_back({i * 10.0, 5, SphericalDir(ulat(rng), ulon(rng))});
        const auto m = accumulate_fixations(fx, dims);
        CHECK(m.grid().image().sum() == doctest::Approx(137.0));
    }
}

TEST_CASE("spherical_blur conserves mass") {
    for (uint64_t seed : {1u, 2u, 3u}) {
        const SaliencyMap m = random_map(128, 64, seed);
        const double before = m.grid().image().sum();
        const SaliencyMap b = spherical_blur(m, 1.5);
        CHECK(b.grid().image().sum() == doctest::Approx(before).epsilon(1e-6));
    }
    // wide-kernel (downsampled) path conserves mass too
    const SaliencyMap m = random_map(256, 128, 9);
    const SaliencyMap b = spherical_blur(m, 12.0);
    CHECK(b.grid().image().sum() == doctest::Approx(m.grid().image().sum()).epsilon(1e-6));
}

TEST_CASE("spherical_blur matches the brute-force spherical kernel within 1% of peak") {
    const int W = 256, H = 128;
    EquirectGrid g(W, H, 1);
    const PixelCoord center = dir_to_pixel(SphericalDir(0, 0), {W, H});
    g.at(center.x, center.y) = 1.0f;
    const SaliencyMap delta(std::move(g), Normalization::RawCounts);

    const SaliencyMap got = spherical_blur(delta, 1.0);
    const SaliencyMap want = blur_oracle(delta, 1.0);
    double peak = 0;
    for (float v : want.grid().image().data) peak = std::max(peak, double(v));
    double worst = 0;
    for (std::size_t i = 0; i < want.grid().image().data.size(); ++i)
        worst = std::max(worst, std::fabs(double(got.grid().image().data[i]) -
                                          want.grid().image().data[i]));
    CHECK(worst <= 0.01 * peak);
}

TEST_CASE("spherical_blur near the pole: zonal input stays zonal, delta response is symmetric") {
    const int W = 128, H = 64;
    // constant top row (the pixelization of pole-concentrated mass) stays
    // constant along every row
    EquirectGrid zonal(W, H, 1);
    for (int x = 0; x < W; ++x) zonal.at(x, 0) = 1.0f;
    const SaliencyMap bz = spherical_blur(SaliencyMap(std::move(zonal), Normalization::RawCounts), 1.0);
    for (int y = 0; y < H; ++y)
        for (int x = 1; x < W; ++x)
            CHECK(std::fabs(bz.at(x, y) - bz.at(0, y)) <= 1e-6 * std::max(1.0f, bz.at(0, y)));

    // a single pole-row delta blurs reflection-symmetrically about its column
    EquirectGrid d(W, H, 1);
    d.at(17, 0) = 1.0f;
    const SaliencyMap bd = spherical_blur(SaliencyMap(std::move(d), Normalization::RawCounts), 1.0);
    for (int y = 0; y < H; ++y)
        for (int k = 1; k < W / 2; ++k)
            CHECK(bd.at((17 + k) % W, y) == bd.at((17 - k + W) % W, y));
}

TEST_CASE("spherical_blur is linear") {
    const SaliencyMap a = random_map(64, 32, 10);
    const SaliencyMap b = random_map(64, 32, 11);
    EquirectGrid combo(64, 32, 1);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x) combo.at(x, y) = 2.0f * a.at(x, y) + 0.5f * b.at(x, y);
    const SaliencyMap ba = spherical_blur(a, 2.0);
    const SaliencyMap bb = spherical_blur(b, 2.0);
    const SaliencyMap bc = spherical_blur(SaliencyMap(std::move(combo), Normalization::RawCounts), 2.0);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x)
            CHECK(bc.at(x, y) ==
                  doctest::Approx(2.0 * ba.at(x, y) + 0.5 * bb.at(x, y)).epsilon(1e-6));
}

TEST_CASE("blur and salient_mask commute with global longitude rotation") {
    const SaliencyMap m = random_map(64, 32, 12);
    const int delta = 13;
    const SaliencyMap rot(rotate_columns(m.grid(), delta), Normalization::RawCounts);

    const SaliencyMap bm = spherical_blur(m, 1.7);
    const SaliencyMap brot = spherical_blur(rot, 1.7);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x) REQUIRE(brot.at((x + delta) % 64, y) == bm.at(x, y));

    const SalientMask mm = salient_mask(m, 5);
    const SalientMask mrot = salient_mask(rot, 5);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x)
            REQUIRE(mrot.mask[std::size_t(y) * 64 + (x + delta) % 64] ==
                    mm.mask[std::size_t(y) * 64 + x]);
}

TEST_CASE("normalize modes, idempotence, and the all-zero error") {
    EquirectGrid g(16, 8, 1);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x) g.at(x, y) = float(1 + ((x * 7 + y * 3) % 4));
    g.at(3, 2) = 5.0f;
    const SaliencyMap m(std::move(g), Normalization::RawCounts);

    const SaliencyMap mx = normalize(m, Normalization::MaxOne);
    float mxMax = 0;
    for (float v : mx.grid().image().data) mxMax = std::max(mxMax, v);
    CHECK(mxMax == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mx.at(3, 2) == doctest::Approx(1.0).epsilon(1e-9));

    const SaliencyMap ms = normalize(m, Normalization::SqSumOne);
    double sq = 0;
    for (float v : ms.grid().image().data) sq += double(v) * v;
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-6));  // float storage, type invariant tolerance

    const SaliencyMap m1 = normalize(m, Normalization::SumOne);
    const SaliencyMap m2 = normalize(m1, Normalization::SumOne);
    for (std::size_t i = 0; i < m1.grid().image().data.size(); ++i)
        CHECK(m2.grid().image().data[i] ==
              doctest::Approx(m1.grid().image().data[i]).epsilon(1e-7));

    // relative ordering is unchanged
    const auto orderBefore = saliency_rank_order(m);
    const auto orderAfter = saliency_rank_order(m1);
    CHECK(orderBefore == orderAfter);

    CHECK_THROWS_AS(normalize(SaliencyMap(EquirectGrid(16, 8, 1), Normalization::RawCounts),
                              Normalization::SumOne),
                    Error);
}

TEST_CASE("entropy: uniform, delta, two peaks") {
    const int W = 64, H = 32;
    const std::size_t N = std::size_t(W) * H;
    {
        EquirectGrid g(W, H, 1, 0.25f);
        CHECK(entropy(SaliencyMap(std::move(g), Normalization::RawCounts)) ==
              doctest::Approx(std::log(double(N))).epsilon(1e-9));
    }
    {
        EquirectGrid g(W, H, 1);
        g.at(5, 5) = 3.0f;
        CHECK(entropy(SaliencyMap(std::move(g), Normalization::RawCounts)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        EquirectGrid g(W, H, 1);
        g.at(5, 5) = 2.0f;
        g.at(40, 20) = 2.0f;
        CHECK(entropy(SaliencyMap(std::move(g), Normalization::RawCounts)) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(entropy(SaliencyMap(EquirectGrid(8, 4, 1), Normalization::RawCounts)), Error);
}

TEST_CASE("entropy is permutation-invariant and maximal for the uniform map") {
    const SaliencyMap m = random_map(32, 16, 20);
    std::vector<float> shuffled = m.grid().image().data;
    std::mt19937_64 rng(21);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    Image img(32, 16, 1);
    img.data = shuffled;
    const SaliencyMap p(EquirectGrid(std::move(img)), Normalization::RawCounts);
    CHECK(entropy(p) == doctest::Approx(entropy(m)).epsilon(1e-9));

    EquirectGrid u(32, 16, 1, 1.0f);
    CHECK(entropy(m) <= entropy(SaliencyMap(std::move(u), Normalization::RawCounts)) + 1e-12);
}

TEST_CASE("salient_mask: tie-breaking, coverage, and full selection") {
    const int W = 40, H = 20;
    const std::size_t N = std::size_t(W) * H;
    {
        EquirectGrid g(W, H, 1, 0.5f);
        const SalientMask mask = salient_mask(SaliencyMap(std::move(g), Normalization::RawCounts), 5);
        const std::size_t k = std::size_t(std::ceil(N * 0.05));
        CHECK(mask.count() == k);
        // constant map: exactly the first k pixels in row-major order
        for (std::size_t i = 0; i < N; ++i) CHECK(mask.mask[i] == (i < k ? 1 : 0));
        CHECK(mask.coverage == doctest::Approx(double(k) / double(N)));
    }
    {
        const SaliencyMap m = random_map(W, H, 30);
        const SalientMask mask = salient_mask(m, 100);
        CHECK(mask.count() == N);
    }
    {
        const SaliencyMap m = random_map(W, H, 31);
        const SalientMask mask = salient_mask(m, 7);
        CHECK(std::fabs(mask.coverage - 0.07) <= 1.0 / double(N));
        CHECK_THROWS_AS(salient_mask(m, 0), Error);
        CHECK_THROWS_AS(salient_mask(m, 101), Error);
    }
}

TEST_CASE("salient_mask of a single blob is a connected cap") {
    const int W = 128, H = 64;
    EquirectGrid g(W, H, 1);
    const Vec3 c = to_unit(SphericalDir(20, -60));
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const double theta = angular_distance(to_unit(pixel_to_dir({x, y}, {W, H})), c);
            g.at(x, y) = float(std::exp(-theta * theta / (2.0 * 15.0 * 15.0)));
        }
    const SalientMask mask = salient_mask(SaliencyMap(std::move(g), Normalization::RawCounts), 5);

    // flood fill from the blob-center pixel with lon wrap
    const PixelCoord start = dir_to_pixel(SphericalDir(20, -60), {W, H});
    REQUIRE(mask.contains(start));
    std::vector<uint8_t> seen(mask.mask.size(), 0);
    std::queue<PixelCoord> fifo;
    fifo.push(start);
    seen[std::size_t(start.y) * W + start.x] = 1;
    std::size_t reached = 0;
    while (!fifo.empty()) {
        const PixelCoord p = fifo.front();
        fifo.pop();
        ++reached;
        const int nx[4] = {(p.x + 1) % W, (p.x - 1 + W) % W, p.x, p.x};
        const int ny[4] = {p.y, p.y, p.y + 1, p.y - 1};
        for (int k = 0; k < 4; ++k) {
            if (ny[k] < 0 || ny[k] >= H) continue;
            const std::size_t idx = std::size_t(ny[k]) * W + nx[k];
            if (seen[idx] || !mask.mask[idx]) continue;
            seen[idx] = 1;
            fifo.push({nx[k], ny[k]});
        }
    }
    CHECK(reached == mask.count());
}

TEST_CASE("mean_map basics and permutation invariance") {
    const SaliencyMap a = random_map(32, 16, 40);
    {
        const std::vector<SaliencyMap> same = {a, a, a};
        const SaliencyMap m = mean_map(same);
        const SaliencyMap n = normalize(a, Normalization::SumOne);
        for (std::size_t i = 0; i < m.grid().image().data.size(); ++i)
            CHECK(m.grid().image().data[i] ==
                  doctest::Approx(n.grid().image().data[i]).epsilon(1e-6));
    }
    {
        // complementary supports partition the sphere -> uniform mean
        EquirectGrid left(32, 16, 1), right(32, 16, 1);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 32; ++x) (x < 16 ? left : right).at(x, y) = 2.0f;
        const std::vector<SaliencyMap> halves = {
            SaliencyMap(std::move(left), Normalization::RawCounts),
            SaliencyMap(std::move(right), Normalization::RawCounts)};
        const SaliencyMap m = mean_map(halves);
        for (float v : m.grid().image().data)
            CHECK(v == doctest::Approx(1.0 / (32 * 16)).epsilon(1e-6));
    }
    {
        const SaliencyMap b = random_map(32, 16, 41);
        const SaliencyMap c = random_map(32, 16, 42);
        const std::vector<SaliencyMap> abc = {a, b, c};
        const std::vector<SaliencyMap> cba = {c, b, a};
        const SaliencyMap m1 = mean_map(abc);
        const SaliencyMap m2 = mean_map(cba);
        for (std::size_t i = 0; i < m1.grid().image().data.size(); ++i)
            CHECK(m1.grid().image().data[i] ==
                  doctest::Approx(m2.grid().image().data[i]).epsilon(1e-7));
    }
    const SaliencyMap small = random_map(16, 8, 43);
    const std::vector<SaliencyMap> bad = {a, small};
    CHECK_THROWS_AS(mean_map(bad), Error);
    CHECK_THROWS_AS(mean_map(std::vector<SaliencyMap>{}), Error);
}

TEST_CASE("SaliencyMap validates its normalization tag") {
    EquirectGrid g(16, 8, 1, 0.5f);
    CHECK_THROWS_AS(SaliencyMap(g, Normalization::SumOne), Error);
    EquirectGrid neg(16, 8, 1);
    neg.at(0, 0) = -0.5f;
    CHECK_THROWS_AS(SaliencyMap(std::move(neg), Normalization::RawCounts), Error);
    EquirectGrid rgb(16, 8, 3);
    CHECK_THROWS_AS(SaliencyMap(std::move(rgb), Normalization::RawCounts), Error);
}
