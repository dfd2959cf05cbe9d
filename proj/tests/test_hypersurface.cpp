#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pshvol/hypersurface.hpp"
#include "pshvol/rng.hpp"

using namespace pshvol;

namespace {

RadialGraph sphere_graph(int n) {
    RadialGraph g;
    g.n = n;
    return g;
}

// seeded small graph built from a few harmonic directions
RadialGraph random_graph(int n, std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    RadialGraph g;
    g.n = n;
    const std::vector<std::pair<int, int>> pool = {{1, 1}, {2, 0}, {2, 1}, {2, 2}, {3, 1}};
    int picks = 2 + rng.index(2);
    for (int k = 0; k < picks; ++k) {
        auto [p, q] = pool[rng.index(static_cast<int>(pool.size()))];
        auto basis = harmonic_basis(n, p, q);
        const auto& P = basis.elements[rng.index(static_cast<int>(basis.elements.size()))];
        g.terms.push_back({rng.uniform() < 0.5, amplitude * rng.uniform(-1.0, 1.0), P});
    }
    return g;
}

RVec random_unit(Rng& rng, int d) {
    RVec x(d);
    double r2 = 0.0;
    for (auto& v : x) {
        v = rng.normal();
        r2 += v * v;
    }
    for (auto& v : x) v /= std::sqrt(r2);
    return x;
}

} // namespace

TEST_CASE("defining jet at the round sphere") {
    auto g = sphere_graph(2);
    Rng rng(17);
    for (int t = 0; t < 5; ++t) {
        RVec xi = random_unit(rng, 4);
        auto jet = defining_jet(g, xi);
        REQUIRE(std::abs(jet.F) < 1e-12);
        // complex gradient of |z| at the sphere is conj(xi)/2
        for (int a = 0; a < 2; ++a) {
            cplx expect = 0.5 * std::conj(cplx(xi[2 * a], xi[2 * a + 1]));
            REQUIRE(std::abs(jet.grad_complex[a] - expect) < 1e-12);
        }
        // radial derivative is 1 for every graph
        REQUIRE(grad_along(jet, xi) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("defining jet derivatives match finite differences") {
    auto g = random_graph(2, 5, 0.08);
    Rng rng(23);
    RVec xi = random_unit(rng, 4);
    auto jet = defining_jet(g, xi);

    REQUIRE(grad_along(jet, xi) == Catch::Approx(1.0).margin(1e-10));

    // FD of F(z) = |z| - e^{f(z/|z|)} around the surface point
    auto Fval = [&](const RVec& z) {
        double r = norm(z);
        RVec zi = z;
        for (auto& v : zi) v /= r;
        return r - std::exp(g.f(zi));
    };
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
        RVec zp = jet.point, zm = jet.point;
        zp[i] += h;
        zm[i] -= h;
        double fd = (Fval(zp) - Fval(zm)) / (2 * h);
        REQUIRE(jet.grad_real[i] == Catch::Approx(fd).epsilon(1e-6).margin(1e-8));
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            RVec zpp = jet.point, zpm = jet.point, zmp = jet.point, zmm = jet.point;
            zpp[i] += h; zpp[j] += h;
            zpm[i] += h; zpm[j] -= h;
            zmp[i] -= h; zmp[j] += h;
            zmm[i] -= h; zmm[j] -= h;
            double fd = (Fval(zpp) - Fval(zpm) - Fval(zmp) + Fval(zmm)) / (4 * h * h);
            REQUIRE(jet.hess_real[i][j] == Catch::Approx(fd).epsilon(2e-5).margin(2e-5));
        }

    // Hermiticity of the complex Hessian
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            REQUIRE(std::abs(jet.hess_complex[a][b] - std::conj(jet.hess_complex[b][a])) < 1e-12);
}

TEST_CASE("Levi density g on round spheres") {
    Rng rng(3);
    for (int n = 2; n <= 3; ++n) {
        auto g = sphere_graph(n);
        RVec xi = random_unit(rng, 2 * n);
        auto jet = defining_jet(g, xi);
        double expect = std::pow(2.0, -(n + 1));
        REQUIRE(levi_density_g(jet) == Catch::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("Levi density scales with the sphere radius") {
    // F = r - kappa at |z| = kappa: g = 2^{-(n+1)} kappa^{-(n-1)}
    for (int n = 2; n <= 3; ++n)
        for (double kappa : {0.5, 2.0}) {
            auto g = sphere_graph(n);
            RadialGraph gk = shifted_graph(g, std::log(kappa));
            Rng rng(10 * n);
            RVec xi = random_unit(rng, 2 * n);
            auto jet = defining_jet(gk, xi);
            double expect = std::pow(2.0, -(n + 1)) * std::pow(kappa, -(n - 1));
            REQUIRE(levi_density_g(jet) == Catch::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("degenerate model has zero Levi density") {
    // flat model F = x_n: zero complex Hessian
    AmbientJet jet;
    jet.n = 2;
    jet.point = {0, 0, 0, 0};
    jet.F = 0;
    jet.grad_real = {0, 0, 1, 0};
    jet.hess_real.assign(4, RVec(4, 0.0));
    jet.grad_complex = {0.0, 0.5};
    jet.hess_complex.assign(2, std::vector<cplx>(2, 0.0));
    REQUIRE(levi_density_g(jet) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("volume density: unit sphere and constant shifts") {
    Rng rng(4);
    for (int n = 2; n <= 3; ++n) {
        auto g = sphere_graph(n);
        for (int t = 0; t < 4; ++t) {
            RVec xi = random_unit(rng, 2 * n);
            REQUIRE(nu_density(g, xi, NuRoute::levi) == Catch::Approx(1.0).epsilon(1e-12));
            REQUIRE(nu_density(g, xi, NuRoute::polar) == Catch::Approx(1.0).epsilon(1e-12));
        }
        for (double c : {-0.3, 0.4}) {
            auto gc = constant_graph(n, c);
            RVec xi = random_unit(rng, 2 * n);
            double expect = std::exp(2.0 * n * n / (n + 1.0) * c);
            REQUIRE(nu_density(gc, xi, NuRoute::levi) == Catch::Approx(expect).epsilon(1e-11));
            REQUIRE(nu_density(gc, xi, NuRoute::polar) == Catch::Approx(expect).epsilon(1e-11));
        }
    }
}

TEST_CASE("the two density routes agree on random graphs") {
    for (int n = 2; n <= 3; ++n) {
        int graphs = (n == 2) ? 8 : 4;
        for (int s = 0; s < graphs; ++s) {
            auto g = random_graph(n, 100 + s, 0.07);
            Rng rng(200 + s);
            for (int k = 0; k < 25; ++k) {
                RVec xi = random_unit(rng, 2 * n);
                auto d = nu_route_diagnostic(g, xi);
                REQUIRE(d.rel_gap <= 1e-6);
            }
        }
    }
}

TEST_CASE("density is invariant under the frame choice") {
    auto g = random_graph(2, 42, 0.08);
    Rng rng(43);
    RVec xi = random_unit(rng, 4);
    SurfacePoint sp = surface_point(g, xi);
    double base = nu_levi_from_jet(sp.jet, sp.xi, sp.t);

    for (int t = 0; t < 10; ++t) {
        // random rotation of the tangent frame (plus possible flip handled by
        // the densities only through orientation; rotate by an SO(2n-1) map)
        int m = static_cast<int>(sp.t.size());
        int i = rng.index(m), j = rng.index(m);
        if (i == j) continue;
        double a = rng.uniform(0, 2 * std::numbers::pi);
        auto tt = sp.t;
        for (int k = 0; k < 4; ++k) {
            tt[i][k] = std::cos(a) * sp.t[i][k] + std::sin(a) * sp.t[j][k];
            tt[j][k] = -std::sin(a) * sp.t[i][k] + std::cos(a) * sp.t[j][k];
        }
        double rotated = nu_levi_from_jet(sp.jet, sp.xi, tt);
        REQUIRE(rotated == Catch::Approx(base).epsilon(1e-12));
        double rotated_p = nu_polar_from_jet(sp.jet, sp.xi, tt);
        REQUIRE(rotated_p == Catch::Approx(nu_polar_from_jet(sp.jet, sp.xi, sp.t)).epsilon(1e-12));
    }
}

TEST_CASE("defining-function invariance: F -> hF with h = 1 on the surface") {
    // h = exp(F * eta) for a random low-degree polynomial eta
    auto g = random_graph(2, 7, 0.06);
    Rng rng(70);
    for (int trial = 0; trial < 10; ++trial) {
        RVec xi = random_unit(rng, 4);
        SurfacePoint sp = surface_point(g, xi);
        double base = nu_levi_from_jet(sp.jet, sp.xi, sp.t);

        double c0 = rng.uniform(-1, 1);
        RVec lin(4), quad(4);
        for (int i = 0; i < 4; ++i) {
            lin[i] = rng.uniform(-1, 1);
            quad[i] = rng.uniform(-0.5, 0.5);
        }
        // recompute the jet of (hF) at the same point
        RVec p = sp.p;
        Jet rr(0.0);
        std::array<Jet, 6> X{};
        for (int i = 0; i < 4; ++i) {
            X[i] = Jet::variable(p[i], i);
            rr = rr + X[i] * X[i];
        }
        Jet Fj = sqrt(rr) - exp(g.f_jet(p));
        Jet eta(c0);
        for (int i = 0; i < 4; ++i) eta = eta + lin[i] * X[i] + quad[i] * X[i] * X[i];
        Jet hF = exp(Fj * eta) * Fj;
        AmbientJet jet2 = AmbientJet::from_jet(hF, p, 2);

        double scaled = nu_levi_from_jet(jet2, sp.xi, sp.t);
        REQUIRE(std::abs(scaled - base) <= 1e-8 * std::abs(base));
        double scaled_p = nu_polar_from_jet(jet2, sp.xi, sp.t);
        REQUIRE(std::abs(scaled_p - base) <= 1e-8 * std::abs(base));
    }
}

TEST_CASE("graph formula at critical points of f") {
    // axially symmetric direction Re(z1 zbar1 - z2 zbar2) has df = 0 at e1;
    // there nu = e^{(2n-1) f} (2^{n-1} det Levi)^{1/(n+1)}
    BigradedPoly P(2, 1, 1);
    P.add_term({1, 0}, {1, 0}, 1.0);
    P.add_term({0, 1}, {0, 1}, -1.0);
    for (double c : {0.05, -0.08}) {
        RadialGraph g;
        g.n = 2;
        g.terms.push_back({false, c, P});
        RVec xi = {1, 0, 0, 0};
        SurfacePoint sp = surface_point(g, xi);
        // df = 0 at the pole
        double dfn = 0.0;
        for (const auto& u : sp.fr.u) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += sp.jet.grad_real[k] * u[k];
            dfn += s * s;
        }
        REQUIRE(std::sqrt(dfn) < 1e-12);

        double nu = nu_levi_from_jet(sp.jet, sp.xi, sp.t);
        auto basis = complex_tangent_basis(sp.jet);
        cplx L = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                L += sp.jet.hess_complex[a][b] * basis[0][a] * std::conj(basis[0][b]);
        double J = L.real();
        double expect = std::exp(3.0 * g.f(xi)) * std::pow(2.0 * J, 1.0 / 3.0);
        REQUIRE(nu == Catch::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("functionals on the round spheres") {
    const double pi = std::numbers::pi;
    auto rule = product_rule_s3(6);
    auto g2 = sphere_graph(2);
    REQUIRE(functional_A(g2, rule) == Catch::Approx(2 * pi * pi).margin(1e-10));
    REQUIRE(functional_V(g2, rule) == Catch::Approx(pi * pi / 2).margin(1e-10));
    double Rs = functional_R(g2, rule);
    REQUIRE(Rs == Catch::Approx(2 * pi * pi / std::pow(pi * pi / 2, 2.0 / 3.0)).margin(1e-9));

    auto g3 = sphere_graph(3);
    auto rule3 = qmc_rule(3, 4000, 5);
    REQUIRE(functional_A(g3, rule3) == Catch::Approx(pi * pi * pi).margin(1e-9));
    REQUIRE(functional_V(g3, rule3) == Catch::Approx(pi * pi * pi / 6).margin(1e-9));
}

TEST_CASE("scaling laws") {
    auto rule = product_rule_s3(6);
    for (double c : {std::log(0.5), std::log(2.0)}) {
        auto g = sphere_graph(2);
        auto gc = constant_graph(2, c);
        double A0 = functional_A(g, rule);
        double Ac = functional_A(gc, rule);
        double kappa = std::exp(c);
        REQUIRE(Ac / A0 == Catch::Approx(std::pow(kappa, 8.0 / 3.0)).epsilon(1e-9));
        double V0 = functional_V(g, rule);
        double Vc = functional_V(gc, rule);
        REQUIRE(Vc / V0 == Catch::Approx(std::pow(kappa, 4.0)).epsilon(1e-12));
    }
}

TEST_CASE("R is scale invariant on random graphs") {
    auto rule = product_rule_s3(7);
    Rng rng(31);
    for (int s = 0; s < 5; ++s) {
        auto g = random_graph(2, 600 + s, 0.06);
        double R0 = functional_R(g, rule);
        for (double c : {-0.3, 0.5}) {
            double Rc = functional_R(shifted_graph(g, c), rule);
            REQUIRE(std::abs(Rc / R0 - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("pseudoconvexity certification") {
    auto rule = product_rule_s3(4);
    auto g = sphere_graph(2);
    auto rep = pseudoconvexity_check(g, rule);
    REQUIRE(rep.certified);
    REQUIRE(rep.min_eigenvalue == Catch::Approx(0.5).epsilon(1e-10));

    // large (2,2) harmonic breaks pseudoconvexity somewhere
    auto b22 = harmonic_basis(2, 2, 2);
    RadialGraph bad;
    bad.n = 2;
    bad.terms.push_back({false, 2.0, b22.elements[0]});
    auto rep_bad = pseudoconvexity_check(bad, rule);
    REQUIRE_FALSE(rep_bad.certified);
    REQUIRE(rep_bad.worst_node >= 0);

    // tiny perturbation stays pseudoconvex
    RadialGraph tiny;
    tiny.n = 2;
    tiny.terms.push_back({false, 0.02, b22.elements[0]});
    REQUIRE(pseudoconvexity_check(tiny, rule).certified);

    REQUIRE_THROWS_AS(functional_report(bad, rule), NotPseudoconvex);
}

TEST_CASE("functional report carries diagnostics") {
    auto g = random_graph(2, 12, 0.05);
    auto rule = product_rule_s3(5);
    auto rep = functional_report(g, rule, 64);
    REQUIRE(rep.min_levi_eig > 0);
    REQUIRE(rep.route_gap <= 1e-6);
    REQUIRE(rep.rule_id == rule.id);
    REQUIRE(rep.A > 0);
    REQUIRE(rep.V > 0);
}
