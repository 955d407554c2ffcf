#include <cmath>
#include <vector>

#include "doctest.h"
#include "spikewhite/errors.hpp"
#include "spikewhite/numerics.hpp"
#include "spikewhite/rng.hpp"

using namespace spikewhite;

namespace {

Matrix reconstruct(const EigenResult& e) {
    const std::size_t n = e.eigenvalues.size();
    Matrix lam(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        lam(i, i) = e.eigenvalues[i];
    }
    return matmul(matmul(e.eigenvectors, lam), transpose(e.eigenvectors));
}

double frobenius(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.data()) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

Matrix random_symmetric(std::size_t n, Rng& rng) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = rng.uniform(-1.0, 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

// Independent sliding-window oracle: plain quadruple loop, no padding tricks shared
// with the implementation.
double window_dot(const Tensor3& img, const Tensor3& ker, std::ptrdiff_t y0,
                  std::ptrdiff_t x0) {
    double acc = 0.0;
    for (std::size_t ky = 0; ky < ker.height; ++ky) {
        for (std::size_t kx = 0; kx < ker.width; ++kx) {
            for (std::size_t c = 0; c < ker.channels; ++c) {
                const std::ptrdiff_t iy = y0 + static_cast<std::ptrdiff_t>(ky);
                const std::ptrdiff_t ix = x0 + static_cast<std::ptrdiff_t>(kx);
                double pix = 0.0;
                if (iy >= 0 && iy < static_cast<std::ptrdiff_t>(img.height) && ix >= 0 &&
                    ix < static_cast<std::ptrdiff_t>(img.width)) {
                    pix = img.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), c);
                }
                acc += pix * ker.at(ky, kx, c);
            }
        }
    }
    return acc;
}

} // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("covariance: hand-computed two-sample case") {
    Matrix samples(2, 2);
    samples(0, 0) = 0.0;
    samples(0, 1) = 0.0;
    samples(1, 0) = 2.0;
    samples(1, 1) = 2.0;
    const auto res = covariance(samples);
    CHECK(res.mean[0] == doctest::Approx(1.0));
    CHECK(res.mean[1] == doctest::Approx(1.0));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(res.cov(i, j) == doctest::Approx(2.0));
        }
    }
}

TEST_CASE("covariance: identical samples give zero covariance") {
    Matrix samples(5, 3);
    for (std::size_t i = 0; i < 5; ++i) {
        samples(i, 0) = 1.5;
        samples(i, 1) = -2.0;
        samples(i, 2) = 0.25;
    }
    const auto res = covariance(samples);
    for (double v : res.cov.data()) {
        CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("covariance: independent axes decorrelate as n grows") {
    Rng rng(7);
    const std::size_t n = 100000;
    Matrix samples(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        samples(i, 0) = rng.normal(0.0, 1.0);
        samples(i, 1) = rng.normal(2.0, 0.5);
        samples(i, 2) = rng.uniform(-1.0, 1.0);
    }
    const auto res = covariance(samples);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j) {
                CHECK(std::fabs(res.cov(i, j)) < 0.05);
            }
        }
    }
}

TEST_CASE("covariance: fewer than two samples is an error") {
    Matrix one(1, 4);
    CHECK_THROWS_AS(covariance(one), DataError);
}

TEST_CASE("covariance: output is exactly symmetric and PSD within tolerance") {
    Rng rng(11);
    Matrix samples(64, 6);
    for (double& v : samples.data()) {
        v = rng.uniform(-3.0, 3.0);
    }
    const auto res = covariance(samples);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(res.cov(i, j) == res.cov(j, i)); // bit-exact
        }
    }
    const auto eig = sym_eigen(res.cov);
    for (double lam : eig.eigenvalues) {
        CHECK(lam > -1e-10);
    }
}

TEST_CASE("sym_eigen: identity") {
    const auto res = sym_eigen(Matrix::identity(3));
    for (double lam : res.eigenvalues) {
        CHECK(lam == doctest::Approx(1.0));
    }
}

TEST_CASE("sym_eigen: diagonal matrix, descending order, axis-aligned vectors") {
    Matrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 3.0;
    const auto res = sym_eigen(m);
    CHECK(res.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(res.eigenvalues[1] == doctest::Approx(1.0));
    // Sign convention makes the dominant entry positive.
    CHECK(res.eigenvectors(1, 0) == doctest::Approx(1.0));
    CHECK(res.eigenvectors(0, 1) == doctest::Approx(1.0));
    CHECK(std::fabs(res.eigenvectors(0, 0)) < 1e-12);
}

TEST_CASE("sym_eigen: random 6x6 reconstruction oracle") {
    Rng rng(3);
    const Matrix m = random_symmetric(6, rng);
    const auto res = sym_eigen(m);
    CHECK(max_abs_diff(reconstruct(res), m) < 1e-8);
}

TEST_CASE("sym_eigen: reconstruction and orthonormality over random sizes") {
    Rng rng(17);
    for (std::size_t n : {2u, 3u, 5u, 8u, 13u, 21u, 40u}) {
        const Matrix m = random_symmetric(n, rng);
        const auto res = sym_eigen(m);

        const double rel = frobenius([&] {
            Matrix diff = reconstruct(res);
            for (std::size_t i = 0; i < diff.data().size(); ++i) {
                diff.data()[i] -= m.data()[i];
            }
            return diff;
        }()) / frobenius(m);
        CHECK(rel < 1e-6);

        const Matrix vtv = matmul(transpose(res.eigenvectors), res.eigenvectors);
        CHECK(max_abs_diff(vtv, Matrix::identity(n)) < 1e-8);

        for (std::size_t i = 0; i + 1 < n; ++i) {
            CHECK(res.eigenvalues[i] >= res.eigenvalues[i + 1]);
        }
    }
}

TEST_CASE("sym_eigen: deterministic across repeat calls") {
    Rng rng(23);
    const Matrix m = random_symmetric(12, rng);
    const auto a = sym_eigen(m);
    const auto b = sym_eigen(m);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("sym_eigen: non-symmetric input rejected") {
    Matrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 0.5;
    CHECK_THROWS_AS(sym_eigen(m), ShapeError);
}

TEST_CASE("correlate2d: 1x1 identity kernel reproduces the image") {
    Rng rng(5);
    Tensor3 img(4, 6, 1);
    for (double& v : img.data) {
        v = rng.uniform(0.0, 1.0);
    }
    Tensor3 ker(1, 1, 1);
    ker.at(0, 0, 0) = 1.0;
    const Tensor3 out = correlate2d(img, ker, 1, 0);
    REQUIRE(out.height == 4);
    REQUIRE(out.width == 6);
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 6; ++x) {
            CHECK(out.at(y, x, 0) == img.at(y, x, 0));
        }
    }
}

TEST_CASE("correlate2d: all-ones 3x3 kernel on a constant image") {
    Tensor3 img(5, 5, 1);
    for (double& v : img.data) {
        v = 0.7;
    }
    Tensor3 ker(3, 3, 1);
    for (double& v : ker.data) {
        v = 1.0;
    }
    const Tensor3 out = correlate2d(img, ker, 1, 1);
    REQUIRE(out.height == 5);
    REQUIRE(out.width == 5);
    // Interior windows see all nine pixels.
    for (std::size_t y = 1; y < 4; ++y) {
        for (std::size_t x = 1; x < 4; ++x) {
            CHECK(out.at(y, x, 0) == doctest::Approx(9 * 0.7));
        }
    }
    CHECK(out.at(0, 0, 0) == doctest::Approx(4 * 0.7)); // corner sees 2x2
}

TEST_CASE("correlate2d: equals brute-force window dot on random instances") {
    Rng rng(29);
    for (int iter = 0; iter < 40; ++iter) {
        const std::size_t h = 1 + rng.below(16);
        const std::size_t w = 1 + rng.below(16);
        const std::size_t c = 1 + rng.below(3);
        const std::size_t kh = 1 + rng.below(h);
        const std::size_t kw = 1 + rng.below(w);
        const std::size_t stride = 1 + rng.below(3);
        const std::size_t pad = rng.below(3);

        Tensor3 img(h, w, c);
        for (double& v : img.data) {
            v = rng.uniform(-1.0, 1.0);
        }
        Tensor3 ker(kh, kw, c);
        for (double& v : ker.data) {
            v = rng.uniform(-1.0, 1.0);
        }

        const Tensor3 out = correlate2d(img, ker, stride, pad);
        const std::size_t exp_h = (h + 2 * pad - kh) / stride + 1;
        const std::size_t exp_w = (w + 2 * pad - kw) / stride + 1;
        REQUIRE(out.height == exp_h);
        REQUIRE(out.width == exp_w);
        REQUIRE(out.channels == 1);

        for (std::size_t oy = 0; oy < out.height; ++oy) {
            for (std::size_t ox = 0; ox < out.width; ++ox) {
                const double expect =
                    window_dot(img, ker,
                               static_cast<std::ptrdiff_t>(oy * stride) -
                                   static_cast<std::ptrdiff_t>(pad),
                               static_cast<std::ptrdiff_t>(ox * stride) -
                                   static_cast<std::ptrdiff_t>(pad));
                CHECK(out.at(oy, ox, 0) == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("correlate2d: channel mismatch rejected") {
    Tensor3 img(4, 4, 3);
    Tensor3 ker(2, 2, 1);
    CHECK_THROWS_AS(correlate2d(img, ker, 1, 0), ShapeError);
}

TEST_SUITE_END();
