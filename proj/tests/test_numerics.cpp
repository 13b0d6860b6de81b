#include <cmath>
#include <limits>

#include <doctest.h>

#include "mifi/numerics.hpp"
#include "mifi/rng.hpp"

using namespace mifi;

TEST_CASE("softmax: symmetric two-logit case") {
    auto p = softmax({0.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax: extreme logits stay finite") {
    auto p = softmax({1000.0, 0.0});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 1e-9);
    for (double v : p) CHECK(std::isfinite(v));
}

TEST_CASE("softmax: hand-computed three-way case") {
    auto p = softmax({std::log(7.0), std::log(2.0), std::log(1.0)});
    CHECK(p[0] == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(p[2] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("softmax: sums to one and stays in (0,1] on random logits") {
    Rng rng(123);
    for (int c = 0; c < 200; ++c) {
        std::vector<double> z(16);
        for (double& v : z) v = 3.0 * rng.next_normal();
        auto p = softmax(z);
        double sum = 0.0;
        for (double v : p) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("softmax: shift invariance") {
    Rng rng(7);
    std::vector<double> z(8);
    for (double& v : z) v = rng.next_normal();
    auto p = softmax(z);
    for (double shift : {-100.0, -1.5, 0.25, 42.0}) {
        std::vector<double> zs = z;
        for (double& v : zs) v += shift;
        auto ps = softmax(zs);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::fabs(ps[i] - p[i]) < 1e-6);
        }
    }
}

TEST_CASE("softmax: rejects empty and non-finite input") {
    CHECK_THROWS_AS(softmax({}), InvalidInputError);
    CHECK_THROWS_AS(softmax({1.0, std::numeric_limits<double>::quiet_NaN()}),
                    InvalidInputError);
    CHECK_THROWS_AS(softmax({1.0, std::numeric_limits<double>::infinity()}),
                    InvalidInputError);
}

TEST_CASE("global_average_pool: constant channels") {
    Tensor ones({2, 4, 7, 7});
    for (float& f : ones.data) f = 1.0f;
    auto p = global_average_pool(ones);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(1.0));

    Tensor two({2, 3, 2, 2});
    for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t w = 0; w < 2; ++w) {
            for (std::size_t h = 0; h < 2; ++h) {
                two.at4(1, t, w, h) = 2.0f;
            }
        }
    }
    auto q = global_average_pool(two);
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(2.0));
}

TEST_CASE("global_average_pool: matches element-loop oracle") {
    Rng rng(55);
    Tensor t({3, 2, 2, 2});
    t.data = rng_normal(rng, t.size(), 0.0, 1.0);
    auto p = global_average_pool(t);
    for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t w = 0; w < 2; ++w) {
                for (std::size_t h = 0; h < 2; ++h) sum += t.at4(c, i, w, h);
            }
        }
        CHECK(p[c] == doctest::Approx(sum / 8.0).epsilon(1e-12));
    }
}

TEST_CASE("global_average_pool: channel permutation commutes with pooling") {
    Rng rng(56);
    Tensor t({4, 2, 3, 3});
    t.data = rng_normal(rng, t.size(), 0.0, 1.0);
    std::vector<std::size_t> perm = {2, 0, 3, 1};
    Tensor tp({4, 2, 3, 3});
    std::size_t cell = 2 * 3 * 3;
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t i = 0; i < cell; ++i) {
            tp.data[c * cell + i] = t.data[perm[c] * cell + i];
        }
    }
    auto p = global_average_pool(t);
    auto pp = global_average_pool(tp);
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(pp[c] == doctest::Approx(p[perm[c]]).epsilon(1e-12));
    }
}

TEST_CASE("global_average_pool: wrong rank is a shape error") {
    Tensor t({2, 3});
    t.data.assign(6, 0.0f);
    CHECK_THROWS_AS(global_average_pool(t), ShapeError);
}

TEST_CASE("rng: identical seeds give identical sequences") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(42);
    for (int i = 0; i < 100; ++i) CHECK(c.next_normal() == d.next_normal());
}

TEST_CASE("rng: different seeds differ within the first 16 draws") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng a(s), b(s + 1000);
        bool differ = false;
        for (int i = 0; i < 16; ++i) {
            if (a.next_u64() != b.next_u64()) {
                differ = true;
                break;
            }
        }
        CHECK(differ);
    }
}

TEST_CASE("rng: forked streams do not depend on parent draw position") {
    Rng a(9);
    Rng child_before = a.fork(3);
    a.next_u64();
    a.next_u64();
    Rng child_after = a.fork(3);
    for (int i = 0; i < 8; ++i) CHECK(child_before.next_u64() == child_after.next_u64());
}

TEST_CASE("rng_normal: zero std yields the mean; negative std rejected") {
    Rng rng(5);
    auto v = rng_normal(rng, 10, 2.5, 0.0);
    for (float f : v) CHECK(f == doctest::Approx(2.5));
    CHECK_THROWS_AS(rng_normal(rng, 3, 0.0, -1.0), InvalidInputError);
}

TEST_CASE("rng_normal: large-sample mean near zero") {
    Rng rng(7);
    const std::size_t n = 1000000;
    auto v = rng_normal(rng, n, 0.0, 1.0);
    double sum = 0.0;
    for (float f : v) sum += f;
    CHECK(std::fabs(sum / static_cast<double>(n)) < 0.01);
}

TEST_CASE("tensor: invariants enforced") {
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), ShapeError);
    Tensor t({2, 1, 1, 1}, {1.0f, 2.0f});
    CHECK(t.at4(1, 0, 0, 0) == 2.0f);
    CHECK_THROWS_AS(t.at4(2, 0, 0, 0), ShapeError);
}
