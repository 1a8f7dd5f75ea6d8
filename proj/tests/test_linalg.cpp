#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/linalg.hpp"
#include "core/rng.hpp"

using namespace rpcs;

namespace {

// Reference Gram: plain triple loop, no tiling, no symmetry tricks.
DenseMatrix gram_reference(const DenseMatrix& x, double lambda) {
    const index_t n = x.rows();
    const index_t p = x.cols();
    DenseMatrix w(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (index_t k = 0; k < p; ++k) acc += x(i, k) * x(j, k);
            w(i, j) = acc + (i == j ? lambda : 0.0);
        }
    }
    return w;
}

DenseMatrix random_matrix(index_t n, index_t p, std::uint64_t seed) {
    Pcg32 rng(seed, 1);
    DenseMatrix x(n, p);
    for (index_t j = 0; j < p; ++j)
        for (index_t i = 0; i < n; ++i) x(i, j) = rng.next_normal();
    return x;
}

// SPD matrix built as A^T A + I so the Cholesky is always well defined.
DenseMatrix random_spd(index_t n, std::uint64_t seed) {
    DenseMatrix a = random_matrix(n, n, seed);
    DenseMatrix w = gram_reference(a, 1.0);
    return w;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    double worst = 0.0;
    for (index_t j = 0; j < a.cols(); ++j)
        for (index_t i = 0; i < a.rows(); ++i)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

}  // namespace

TEST_CASE("dot matches a plain loop") {
    std::vector<double> a = {1.0, -2.0, 3.0, 0.5};
    std::vector<double> b = {2.0, 0.25, -1.0, 8.0};
    // 1*2 - 2*0.25 - 3*1 + 0.5*8 = 2.5
    CHECK(dot(a.data(), b.data(), 4) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("gram of the zero matrix is lambda times identity") {
    DenseMatrix x(3, 5);
    DenseMatrix w = gram_ridge(x, 0.5, 1);
    for (index_t i = 0; i < 3; ++i)
        for (index_t j = 0; j < 3; ++j)
            CHECK(w(i, j) == (i == j ? 0.5 : 0.0));
}

TEST_CASE("gram matches the triple-loop reference") {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        DenseMatrix x = random_matrix(4, 10, seed);
        DenseMatrix fast = gram_ridge(x, 2.0, 1);
        DenseMatrix ref = gram_reference(x, 2.0);
        CHECK(max_abs_diff(fast, ref) < 1e-12);
    }
    // Wide and tall shapes, including tile-boundary sizes around the
    // internal block width.
    for (auto [n, p] : std::vector<std::pair<index_t, index_t>>{
             {47, 3}, {48, 5}, {49, 5}, {96, 2}, {13, 200}, {1, 7}}) {
        DenseMatrix x = random_matrix(n, p, 100 + static_cast<std::uint64_t>(n));
        CHECK(max_abs_diff(gram_ridge(x, 0.3, 1), gram_reference(x, 0.3)) < 1e-10);
    }
}

TEST_CASE("gram ridge term is exactly additive on the diagonal") {
    DenseMatrix x = random_matrix(6, 9, 11);
    DenseMatrix w0 = gram_ridge(x, 1.0, 1);
    DenseMatrix w1 = gram_ridge(x, 4.25, 1);
    for (index_t i = 0; i < 6; ++i)
        for (index_t j = 0; j < 6; ++j) {
            if (i == j)
                CHECK(w1(i, j) - w0(i, j) == doctest::Approx(3.25).epsilon(1e-15));
            else
                CHECK(w1(i, j) == w0(i, j));
        }
}

TEST_CASE("gram is identical across thread counts") {
    DenseMatrix x = random_matrix(37, 301, 21);
    DenseMatrix w1 = gram_ridge(x, 1.5, 1);
    DenseMatrix w4 = gram_ridge(x, 1.5, 4);
    for (index_t j = 0; j < 37; ++j)
        for (index_t i = 0; i < 37; ++i)
            CHECK(w1(i, j) == w4(i, j));
}

TEST_CASE("gram rejects a negative ridge") {
    DenseMatrix x(2, 2);
    CHECK_THROWS_AS(gram_ridge(x, -1.0, 1), Error);
}

TEST_CASE("cholesky of a scaled identity") {
    DenseMatrix w = DenseMatrix::identity(3);
    for (index_t i = 0; i < 3; ++i) w(i, i) = 4.0;
    CholeskyFactor f = cholesky(w);
    for (index_t i = 0; i < 3; ++i)
        for (index_t j = 0; j < 3; ++j)
            CHECK(f.s(i, j) == (i == j ? 2.0 : 0.0));
}

TEST_CASE("cholesky of a hand-worked 2x2") {
    // [[4,2],[2,5]] = S^T S with S = [[2,1],[0,2]].
    DenseMatrix w(2, 2);
    w(0, 0) = 4.0; w(0, 1) = 2.0;
    w(1, 0) = 2.0; w(1, 1) = 5.0;
    CholeskyFactor f = cholesky(w);
    CHECK(f.s(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f.s(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.s(1, 0) == 0.0);
    CHECK(f.s(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("cholesky reconstructs the input") {
    for (index_t n : {2, 5, 17, 50}) {
        DenseMatrix w = random_spd(n, 40 + static_cast<std::uint64_t>(n));
        CholeskyFactor f = cholesky(w);
        // Strict lower triangle must be exactly zero.
        for (index_t j = 0; j < n; ++j)
            for (index_t i = j + 1; i < n; ++i) CHECK(f.s(i, j) == 0.0);
        // S^T S == W up to roundoff relative to the diagonal scale.
        double scale = 0.0;
        for (index_t i = 0; i < n; ++i) scale = std::max(scale, w(i, i));
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (index_t k = 0; k <= std::min(i, j); ++k)
                    acc += f.s(k, i) * f.s(k, j);
                CHECK(std::abs(acc - w(i, j)) < 1e-10 * scale);
            }
    }
}

TEST_CASE("cholesky rejects an indefinite matrix and names the pivot") {
    DenseMatrix w(2, 2);
    w(0, 0) = 1.0; w(0, 1) = 2.0;
    w(1, 0) = 2.0; w(1, 1) = 1.0;
    try {
        cholesky(w);
        FAIL("expected a numeric error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::numeric);
        CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }
}

TEST_CASE("cholesky rejects a non-square input") {
    DenseMatrix w(2, 3);
    CHECK_THROWS_AS(cholesky(w), Error);
}

TEST_CASE("transposed triangular solve on hand-worked systems") {
    // S = [[2,1],[0,2]]: S^T v = (2,5) gives v = (1,2).
    DenseMatrix w(2, 2);
    w(0, 0) = 4.0; w(0, 1) = 2.0;
    w(1, 0) = 2.0; w(1, 1) = 5.0;
    CholeskyFactor f = cholesky(w);
    std::vector<double> b = {2.0, 5.0};
    std::vector<double> v = solve_transposed_triangular(f, b);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-15));

    CholeskyFactor id{DenseMatrix::identity(3)};
    std::vector<double> b3 = {1.0, 2.0, 3.0};
    std::vector<double> v3 = solve_transposed_triangular(id, b3);
    CHECK(v3[0] == 1.0);
    CHECK(v3[1] == 2.0);
    CHECK(v3[2] == 3.0);
}

TEST_CASE("both triangular solves invert their own multiply") {
    for (index_t n : {3, 11, 30}) {
        DenseMatrix w = random_spd(n, 70 + static_cast<std::uint64_t>(n));
        CholeskyFactor f = cholesky(w);
        Pcg32 rng(5, 2);
        std::vector<double> b(n);
        for (auto& v : b) v = rng.next_normal();

        std::vector<double> u = solve_transposed_triangular(f, b);
        for (index_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (index_t k = 0; k <= i; ++k) acc += f.s(k, i) * u[k];
            CHECK(acc == doctest::Approx(b[i]).epsilon(1e-9));
        }

        std::vector<double> t = solve_triangular(f, b);
        for (index_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (index_t k = i; k < n; ++k) acc += f.s(i, k) * t[k];
            CHECK(acc == doctest::Approx(b[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("invert_spd on diagonal and identity matrices") {
    DenseMatrix id = DenseMatrix::identity(4);
    DenseMatrix inv = invert_spd(id, 1);
    CHECK(max_abs_diff(inv, DenseMatrix::identity(4)) < 1e-15);

    DenseMatrix d(2, 2);
    d(0, 0) = 2.0; d(1, 1) = 4.0;
    DenseMatrix dinv = invert_spd(d, 1);
    CHECK(dinv(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dinv(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(dinv(0, 1) == 0.0);
}

TEST_CASE("invert_spd produces a symmetric two-sided inverse") {
    for (index_t n : {2, 6, 25}) {
        DenseMatrix w = random_spd(n, 90 + static_cast<std::uint64_t>(n));
        DenseMatrix inv = invert_spd(w, 1);
        for (index_t i = 0; i < n; ++i)
            for (index_t j = 0; j < n; ++j) {
                CHECK(inv(i, j) == inv(j, i));
                double acc = 0.0;
                for (index_t k = 0; k < n; ++k) acc += w(i, k) * inv(k, j);
                CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-9);
            }
    }
}

TEST_CASE("invert_spd is identical across thread counts") {
    DenseMatrix w = random_spd(18, 123);
    DenseMatrix a = invert_spd(w, 1);
    DenseMatrix b = invert_spd(w, 4);
    for (index_t j = 0; j < 18; ++j)
        for (index_t i = 0; i < 18; ++i) CHECK(a(i, j) == b(i, j));
}

TEST_CASE("dual and primal ridge inverses agree") {
    // (X^T X + l I)^{-1} == (1/l) (I - X^T (X X^T + l I)^{-1} X), checked
    // entrywise.  This is the identity the fast screening path rests on.
    for (std::uint64_t seed : {3u, 4u}) {
        for (double lambda : {0.1, 1.0, 10.0}) {
            const index_t n = 8, p = 17;
            DenseMatrix x = random_matrix(n, p, seed);

            DenseMatrix primal(p, p);
            for (index_t a = 0; a < p; ++a)
                for (index_t b = 0; b < p; ++b)
                    primal(a, b) = dot(x.col(a), x.col(b), n) +
                                   (a == b ? lambda : 0.0);
            DenseMatrix primal_inv = invert_spd(primal, 1);

            DenseMatrix w = gram_ridge(x, lambda, 1);
            DenseMatrix w_inv = invert_spd(w, 1);
            for (index_t a = 0; a < p; ++a)
                for (index_t b = 0; b < p; ++b) {
                    double m = 0.0;
                    for (index_t i = 0; i < n; ++i)
                        for (index_t j = 0; j < n; ++j)
                            m += x(i, a) * w_inv(i, j) * x(j, b);
                    double dual = ((a == b ? 1.0 : 0.0) - m) / lambda;
                    CHECK(std::abs(dual - primal_inv(a, b)) < 1e-8);
                }
        }
    }
}
