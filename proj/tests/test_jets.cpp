#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pshvol/jets.hpp"
#include "pshvol/rng.hpp"

using namespace pshvol;

namespace {

using std::exp;
using std::log;
using std::pow;
using std::sqrt;

double inv(double x) { return 1.0 / x; }
double powi(double x, int e) { return std::pow(x, e); }

// scalar pipeline exercising every elementary operation
template <typename T>
T pipeline(const T& x, const T& y, const T& z) {
    T a = x * y + 2.0 * z;
    T b = exp(x * 0.3) - log(y + 3.0);
    T c = sqrt(x * x + y * y + z * z + 1.0);
    T d = pow(c, 1.7) * inv(b + 4.0);
    return a * d + powi(y, 3) - x / c;
}

double pipeline_d(double x, double y, double z) { return pipeline<double>(x, y, z); }

} // namespace

TEST_CASE("second-order jets match central finite differences") {
    Rng rng(31);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        double x = rng.uniform(0.2, 1.5), y = rng.uniform(0.2, 1.5), z = rng.uniform(-1.0, 1.0);
        auto J = pipeline(Jet2<3>::variable(x, 0), Jet2<3>::variable(y, 1), Jet2<3>::variable(z, 2));

        double base[3] = {x, y, z};
        auto at = [&](double dx, double dy, double dz) { return pipeline_d(x + dx, y + dy, z + dz); };

        REQUIRE(J.v == Catch::Approx(at(0, 0, 0)));
        for (int i = 0; i < 3; ++i) {
            double d[3] = {0, 0, 0};
            d[i] = h;
            double fd = (at(d[0], d[1], d[2]) - at(-d[0], -d[1], -d[2])) / (2 * h);
            REQUIRE(J.g[i] == Catch::Approx(fd).epsilon(1e-6).margin(1e-8));
        }
        // diagonal and mixed second derivatives
        for (int i = 0; i < 3; ++i) {
            double d[3] = {0, 0, 0};
            d[i] = h;
            double fd = (at(d[0], d[1], d[2]) - 2 * at(0, 0, 0) + at(-d[0], -d[1], -d[2])) / (h * h);
            REQUIRE(J.hess(i, i) == Catch::Approx(fd).epsilon(2e-5).margin(1e-5));
        }
        double fdxy = (at(h, h, 0) - at(h, -h, 0) - at(-h, h, 0) + at(-h, -h, 0)) / (4 * h * h);
        REQUIRE(J.hess(0, 1) == Catch::Approx(fdxy).epsilon(2e-5).margin(1e-5));
        REQUIRE(J.hess(0, 1) == Catch::Approx(J.hess(1, 0)).margin(1e-13));
        (void)base;
    }
}

TEST_CASE("complex-over-jet arithmetic agrees with std::complex at order zero") {
    Cx<double> z(0.4, -0.7), w(1.2, 0.3);
    auto p = cpowi(z * w + conj(z), 3);
    std::complex<double> zz(0.4, -0.7), ww(1.2, 0.3);
    auto q = std::pow(zz * ww + std::conj(zz), 3);
    REQUIRE(p.re == Catch::Approx(q.real()).margin(1e-14));
    REQUIRE(p.im == Catch::Approx(q.imag()).margin(1e-14));
}
