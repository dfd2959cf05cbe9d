#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>

#include "pshvol/alt_forms.hpp"
#include "pshvol/rng.hpp"

using namespace pshvol;

namespace {

AlternatingForm random_form(Rng& rng, int dim, int deg) {
    AlternatingForm a(dim, deg);
    for (int i = 0; i < a.size(); ++i)
        a.coeff_by_rank(i) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return a;
}

FormVector random_vector(Rng& rng, int dim) {
    FormVector v(dim);
    for (int i = 0; i < dim; ++i) v.c[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return v;
}

// independent evaluation oracle: sum over permutations of the product of
// 1-form factors is encoded by the minor determinant per stored tuple
cplx determinant_oracle(const AlternatingForm& a, const std::vector<FormVector>& frame) {
    int k = a.degree();
    cplx total = 0.0;
    for (int r = 0; r < a.size(); ++r) {
        unsigned mask = a.mask_of_rank(r);
        std::vector<int> idx;
        for (int b = 0; b < a.dim(); ++b)
            if (mask & (1u << b)) idx.push_back(b);
        // det of k x k minor M[s][t] = frame[t][idx[s]] by permutation expansion
        std::vector<int> perm(k);
        for (int i = 0; i < k; ++i) perm[i] = i;
        cplx det = 0.0;
        do {
            int inv = 0;
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    if (perm[i] > perm[j]) ++inv;
            cplx prod = (inv % 2) ? -1.0 : 1.0;
            for (int i = 0; i < k; ++i) prod *= frame[perm[i]].c[idx[i]];
            det += prod;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += a.coeff_by_rank(r) * det;
    }
    return total;
}

} // namespace

TEST_CASE("wedge basis cases") {
    auto dx1 = AlternatingForm::basis_covector(4, 0);
    auto dx2 = AlternatingForm::basis_covector(4, 1);
    auto w = wedge(dx1, dx2);
    REQUIRE(w.coeff(0b0011).real() == Catch::Approx(1.0));
    REQUIRE(w.coeff(0b0011).imag() == 0.0);

    // odd-degree square vanishes
    Rng rng(7);
    auto a = random_form(rng, 6, 3);
    auto aa = wedge(a, a);
    REQUIRE(aa.max_abs() < 1e-15);
}

TEST_CASE("wedge error paths") {
    AlternatingForm a(4, 2), b(5, 2), c(4, 3);
    REQUIRE_THROWS_AS(wedge(a, b), DimensionMismatch);
    REQUIRE_THROWS_AS(wedge(a, c), DegreeOverflow);
}

TEST_CASE("contraction basis cases") {
    auto dx1 = AlternatingForm::basis_covector(4, 0);
    auto dx2 = AlternatingForm::basis_covector(4, 1);
    auto w = wedge(dx1, dx2);
    auto e1 = FormVector::basis(4, 0);
    auto r = contract(e1, w);
    REQUIRE(r.coeff(0b0010).real() == Catch::Approx(1.0));
    REQUIRE(std::abs(r.coeff(0b0100)) < 1e-15);

    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        auto a = random_form(rng, 6, 4);
        auto v = random_vector(rng, 6);
        auto z = contract(v, contract(v, a));
        REQUIRE(z.max_abs() < 1e-13);
    }
}

TEST_CASE("graded commutativity, associativity, Leibniz on random forms") {
    for (int dim = 4; dim <= 6; ++dim) {
        Rng rng(100 + dim);
        for (int trial = 0; trial < 100; ++trial) {
            int p = 1 + rng.index(2);
            int q = 1 + rng.index(2);
            int r = rng.index(2);
            if (p + q + r > dim) continue;
            auto a = random_form(rng, dim, p);
            auto b = random_form(rng, dim, q);
            auto c = random_form(rng, dim, r);

            auto ab = wedge(a, b);
            auto ba = wedge(b, a);
            double sign = (p * q % 2) ? -1.0 : 1.0;
            auto diff = ab - sign * ba;
            REQUIRE(diff.max_abs() < 1e-12 * (1.0 + ab.max_abs()));

            auto left = wedge(ab, c);
            auto right = wedge(a, wedge(b, c));
            auto adiff = left - right;
            REQUIRE(adiff.max_abs() < 1e-12 * (1.0 + left.max_abs()));

            auto v = random_vector(rng, dim);
            auto lhs = contract(v, ab);
            cplx sp = (p % 2) ? -1.0 : 1.0;
            auto rhs = wedge(contract(v, a), b) + sp * wedge(a, contract(v, b));
            auto ldiff = lhs - rhs;
            REQUIRE(ldiff.max_abs() < 1e-12 * (1.0 + lhs.max_abs()));
        }
    }
}

TEST_CASE("evaluation equals the determinant-expansion oracle") {
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        int dim = 4 + rng.index(3);
        int deg = 1 + rng.index(std::min(dim, 4));
        auto a = random_form(rng, dim, deg);
        std::vector<FormVector> frame;
        for (int i = 0; i < deg; ++i) frame.push_back(random_vector(rng, dim));
        cplx lhs = evaluate_on_frame(a, frame);
        cplx rhs = determinant_oracle(a, frame);
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("evaluation basics") {
    auto top = AlternatingForm::top(5, cplx(2.5, -1.0));
    std::vector<FormVector> frame;
    for (int i = 0; i < 5; ++i) frame.push_back(FormVector::basis(5, i));
    REQUIRE(evaluate_on_frame(top, frame) == cplx(2.5, -1.0));

    // linearly dependent frame evaluates to zero
    Rng rng(9);
    auto a = random_form(rng, 5, 3);
    auto v = random_vector(rng, 5);
    std::vector<FormVector> dep{v, v, random_vector(rng, 5)};
    REQUIRE(std::abs(evaluate_on_frame(a, dep)) < 1e-14);
}

TEST_CASE("Calabi-Yau constant gives the standard volume") {
    for (int n = 1; n <= 3; ++n) {
        auto psi = holomorphic_volume(n);
        auto mu = cy_constant(n) * wedge(psi, conj(psi));
        std::vector<FormVector> frame;
        for (int i = 0; i < 2 * n; ++i) frame.push_back(FormVector::basis(2 * n, i));
        cplx v = evaluate_on_frame(mu, frame);
        REQUIRE(v.real() == Catch::Approx(1.0).margin(1e-14));
        REQUIRE(std::abs(v.imag()) < 1e-14);
    }
}

TEST_CASE("density_ratio") {
    auto mu = standard_volume(2);
    REQUIRE(density_ratio(2.0 * mu, mu).real() == Catch::Approx(2.0));
    auto zero = AlternatingForm(4, 4);
    REQUIRE_THROWS_AS(density_ratio(mu, zero), ZeroReference);
}

TEST_CASE("standard S3 contact data: theta ^ dtheta = 2 vol at a point") {
    // at p = (1,0,0,0): theta = dy1, dtheta = 2(dx1^dy1 + dx2^dy2)
    auto theta = AlternatingForm::basis_covector(4, 1);
    AlternatingForm dtheta(4, 2);
    dtheta.set_coeff(0b0011, 2.0);
    dtheta.set_coeff(0b1100, 2.0);
    auto w = wedge(theta, dtheta);
    // oriented tangent frame at p: (v, dx2, dy2) with v = d/dy1
    std::vector<FormVector> frame{FormVector::basis(4, 1), FormVector::basis(4, 2), FormVector::basis(4, 3)};
    REQUIRE(evaluate_on_frame(w, frame).real() == Catch::Approx(2.0));
}

TEST_CASE("pullback transforms covariantly") {
    Rng rng(77);
    auto a = random_form(rng, 5, 2);
    std::vector<FormVector> L;
    for (int i = 0; i < 5; ++i) L.push_back(random_vector(rng, 5));
    auto pa = pullback(a, L);
    // evaluate both sides on random frames
    for (int t = 0; t < 5; ++t) {
        std::vector<FormVector> fr, pushed;
        for (int i = 0; i < 2; ++i) {
            auto v = random_vector(rng, 5);
            fr.push_back(v);
            FormVector w(5);
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 5; ++c) w.c[r] += L[c].c[r] * v.c[c];
            pushed.push_back(w);
        }
        cplx lhs = evaluate_on_frame(pa, fr);
        cplx rhs = evaluate_on_frame(a, pushed);
        REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
    }
}
