#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lrpd/kernels.hpp"

using namespace lrpd;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar backend basics") {
    const auto& s = kern::scalar_backend();
    std::vector<double> x{1, 2, 3}, y{4, -5, 6};
    CHECK(s.dot(x.data(), y.data(), 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
    CHECK(s.nrm2sq(x.data(), 3) == doctest::Approx(14.0));
    s.axpy(2.0, x.data(), y.data(), 3);
    CHECK(y[0] == doctest::Approx(6.0));
    CHECK(y[2] == doctest::Approx(12.0));
    s.scal(0.5, y.data(), 3);
    CHECK(y[0] == doctest::Approx(3.0));
}

TEST_CASE("rot is an exact rotation on the scalar backend") {
    std::mt19937_64 rng(7);
    auto x = random_vec(33, rng);
    auto y = random_vec(33, rng);
    double before = kern::scalar_backend().nrm2sq(x.data(), 33) +
                    kern::scalar_backend().nrm2sq(y.data(), 33);
    double c = std::cos(0.3), s = std::sin(0.3);
    kern::scalar_backend().rot(x.data(), y.data(), 33, c, s);
    double after = kern::scalar_backend().nrm2sq(x.data(), 33) +
                   kern::scalar_backend().nrm2sq(y.data(), 33);
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("simd backend matches scalar reference") {
    if (!kern::avx2_available()) {
        MESSAGE("avx2 not available on this machine; dispatch stays scalar");
        CHECK(std::string(kern::active().name) == "scalar");
        return;
    }
    REQUIRE(kern::force_backend("avx2"));
    const auto& simd = kern::active();
    const auto& ref = kern::scalar_backend();

    std::mt19937_64 rng(20240811);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 16u, 17u, 64u, 257u, 1000u}) {
        auto x = random_vec(n, rng);
        auto y = random_vec(n, rng);

        double d1 = ref.dot(x.data(), y.data(), n);
        double d2 = simd.dot(x.data(), y.data(), n);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));

        CHECK(ref.nrm2sq(x.data(), n) == doctest::Approx(simd.nrm2sq(x.data(), n)).epsilon(1e-12));

        auto y1 = y, y2 = y;
        ref.axpy(1.7, x.data(), y1.data(), n);
        simd.axpy(1.7, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));

        auto x1 = x, x2 = x;
        ref.scal(-0.31, x1.data(), n);
        simd.scal(-0.31, x2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-13));

        auto rx1 = x, ry1 = y, rx2 = x, ry2 = y;
        double c = std::cos(1.1), s = std::sin(1.1);
        ref.rot(rx1.data(), ry1.data(), n, c, s);
        simd.rot(rx2.data(), ry2.data(), n, c, s);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(rx1[i] == doctest::Approx(rx2[i]).epsilon(1e-13));
            CHECK(ry1[i] == doctest::Approx(ry2[i]).epsilon(1e-13));
        }
    }
    kern::force_backend("auto");
}

TEST_CASE("force_backend rejects unknown names") {
    CHECK_FALSE(kern::force_backend("sse9"));
    CHECK(kern::force_backend("auto"));
}
