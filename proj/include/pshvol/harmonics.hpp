#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "pshvol/errors.hpp"
#include "pshvol/jets.hpp"

namespace pshvol {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Polynomials on C^n of bidegree (p,q): degree p in z and q in zbar, stored
// as monomials z^a zbar^b with |a| = p, |b| = q.
// ---------------------------------------------------------------------------
struct Monomial {
    std::vector<int> a, b;
    cplx coeff;
};

class BigradedPoly {
  public:
    BigradedPoly() = default;
    BigradedPoly(int n, int p, int q) : n_(n), p_(p), q_(q) {}

    int n() const { return n_; }
    int p() const { return p_; }
    int q() const { return q_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    void add_term(const std::vector<int>& a, const std::vector<int>& b, cplx c) {
        int sa = 0, sb = 0;
        for (int x : a) sa += x;
        for (int x : b) sb += x;
        if (static_cast<int>(a.size()) != n_ || static_cast<int>(b.size()) != n_ || sa != p_ || sb != q_)
            throw DimensionMismatch("BigradedPoly: monomial bidegree mismatch");
        for (auto& m : terms_)
            if (m.a == a && m.b == b) {
                m.coeff += c;
                return;
            }
        terms_.push_back({a, b, c});
    }

    BigradedPoly& operator*=(cplx s) {
        for (auto& m : terms_) m.coeff *= s;
        return *this;
    }
    BigradedPoly& operator+=(const BigradedPoly& o) {
        if (o.n_ != n_ || o.p_ != p_ || o.q_ != q_)
            throw DimensionMismatch("BigradedPoly: bidegree mismatch in +=");
        for (const auto& m : o.terms_) add_term(m.a, m.b, m.coeff);
        return *this;
    }

    template <typename T>
    Cx<T> eval(const std::vector<Cx<T>>& z) const {
        Cx<T> acc(T(0.0), T(0.0));
        for (const auto& m : terms_) {
            Cx<T> t(T(1.0), T(0.0));
            for (int i = 0; i < n_; ++i) {
                if (m.a[i]) t = t * cpowi(z[i], m.a[i]);
                if (m.b[i]) t = t * cpowi(conj(z[i]), m.b[i]);
            }
            acc = acc + cmul(t, m.coeff.real(), m.coeff.imag());
        }
        return acc;
    }

    cplx eval_point(const std::vector<cplx>& z) const {
        std::vector<Cx<double>> zz(n_);
        for (int i = 0; i < n_; ++i) zz[i] = Cx<double>(z[i].real(), z[i].imag());
        Cx<double> r = eval(zz);
        return cplx(r.re, r.im);
    }

    // complex conjugate polynomial, bidegree (q,p)
    BigradedPoly conjugate() const {
        BigradedPoly r(n_, q_, p_);
        for (const auto& m : terms_) r.add_term(m.b, m.a, std::conj(m.coeff));
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
        return m;
    }

    void sort_terms() {
        std::sort(terms_.begin(), terms_.end(), [](const Monomial& x, const Monomial& y) {
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });
    }

  private:
    int n_ = 2, p_ = 0, q_ = 0;
    std::vector<Monomial> terms_;
};

// sum_a d^2 P / dz_a dzbar_a, exact on monomial coefficients; for p=0 or q=0
// the result is the zero polynomial of bidegree (p-1, q-1) by convention.
inline BigradedPoly contraction(const BigradedPoly& P) {
    BigradedPoly r(P.n(), std::max(P.p() - 1, 0), std::max(P.q() - 1, 0));
    if (P.p() < 1 || P.q() < 1) return r;
    for (const auto& m : P.terms())
        for (int i = 0; i < P.n(); ++i)
            if (m.a[i] >= 1 && m.b[i] >= 1) {
                auto a = m.a;
                auto b = m.b;
                double fac = a[i] * b[i];
                a[i] -= 1;
                b[i] -= 1;
                r.add_term(a, b, fac * m.coeff);
            }
    return r;
}

// Euclidean Laplacian on R^{2n} equals 4 * contraction.
inline BigradedPoly euclidean_laplacian(const BigradedPoly& P) {
    BigradedPoly r = contraction(P);
    r *= 4.0;
    return r;
}

inline double poly_l2_residual(const BigradedPoly& P) {
    double s = 0.0;
    for (const auto& m : P.terms()) s += std::norm(m.coeff);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Exact sphere moments: int_{S^{2n-1}} z^a zbar^b dsigma vanishes unless
// a == b, and equals 2 pi^n prod(a!) / (n-1+|a|)! otherwise.
// ---------------------------------------------------------------------------
inline double sphere_volume(int n) {
    double f = 1.0;
    for (int i = 2; i <= n - 1; ++i) f *= i;
    return 2.0 * std::pow(std::numbers::pi, n) / f;
}

inline double ball_volume(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return std::pow(std::numbers::pi, n) / f;
}

inline double sphere_monomial_moment(const std::vector<int>& a, const std::vector<int>& b) {
    if (a != b) return 0.0;
    int n = static_cast<int>(a.size());
    int tot = 0;
    double prod = 1.0;
    for (int x : a) {
        tot += x;
        for (int i = 2; i <= x; ++i) prod *= i;
    }
    double denom = 1.0;
    for (int i = 2; i <= n - 1 + tot; ++i) denom *= i;
    return 2.0 * std::pow(std::numbers::pi, n) * prod / denom;
}

// int_S P * Q dsigma (no conjugation)
inline cplx integral_product(const BigradedPoly& P, const BigradedPoly& Q) {
    cplx s = 0.0;
    for (const auto& mp : P.terms())
        for (const auto& mq : Q.terms()) {
            std::vector<int> a(P.n()), b(P.n());
            for (int i = 0; i < P.n(); ++i) {
                a[i] = mp.a[i] + mq.a[i];
                b[i] = mp.b[i] + mq.b[i];
            }
            double mom = sphere_monomial_moment(a, b);
            if (mom != 0.0) s += mp.coeff * mq.coeff * mom;
        }
    return s;
}

// Hermitian L^2(S^{2n-1}) inner product <P,Q> = int P conj(Q)
inline cplx sphere_inner(const BigradedPoly& P, const BigradedPoly& Q) {
    return integral_product(P, Q.conjugate());
}

// ---------------------------------------------------------------------------
// Monomial basis of s^{p,q} in deterministic order.
// ---------------------------------------------------------------------------
inline void enumerate_multiindices(int n, int total, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(n, 0);
    // lexicographic enumeration
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == n - 1) {
            cur[pos] = rem;
            out.push_back(cur);
            return;
        }
        for (int v = rem; v >= 0; --v) {
            cur[pos] = v;
            self(self, pos + 1, rem - v);
        }
    };
    rec(rec, 0, total);
}

inline std::vector<BigradedPoly> monomial_basis(int n, int p, int q) {
    std::vector<std::vector<int>> as, bs;
    enumerate_multiindices(n, p, as);
    enumerate_multiindices(n, q, bs);
    std::vector<BigradedPoly> basis;
    basis.reserve(as.size() * bs.size());
    for (const auto& a : as)
        for (const auto& b : bs) {
            BigradedPoly P(n, p, q);
            P.add_term(a, b, 1.0);
            basis.push_back(P);
        }
    return basis;
}

// ---------------------------------------------------------------------------
// HarmonicBasis: L^2-orthonormal basis of h^{p,q}, the kernel of the
// contraction map on s^{p,q}.
// ---------------------------------------------------------------------------
struct HarmonicBasis {
    int n = 2, p = 0, q = 0;
    std::vector<BigradedPoly> elements;
};

inline HarmonicBasis harmonic_basis(int n, int p, int q, int degree_cap = 6) {
    if (p + q > degree_cap) throw DegreeCapExceeded("harmonic_basis: p+q exceeds the degree cap");
    if (n < 2) throw DimensionMismatch("harmonic_basis: n must be at least 2");

    std::vector<BigradedPoly> mono = monomial_basis(n, p, q);
    const int dim_s = static_cast<int>(mono.size());

    Eigen::MatrixXcd kernel;
    if (p == 0 || q == 0) {
        kernel = Eigen::MatrixXcd::Identity(dim_s, dim_s);
    } else {
        std::vector<BigradedPoly> image = monomial_basis(n, p - 1, q - 1);
        const int dim_t = static_cast<int>(image.size());
        // index map for the target monomials
        auto index_of = [&](const std::vector<int>& a, const std::vector<int>& b) {
            for (int j = 0; j < dim_t; ++j) {
                const Monomial& m = image[j].terms()[0];
                if (m.a == a && m.b == b) return j;
            }
            return -1;
        };
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(dim_t, dim_s);
        for (int i = 0; i < dim_s; ++i) {
            BigradedPoly ci = contraction(mono[i]);
            for (const auto& m : ci.terms()) C(index_of(m.a, m.b), i) += m.coeff;
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double tol = 1e-10 * (sv.size() ? sv(0) : 1.0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > tol) ++rank;
        kernel = svd.matrixV().rightCols(dim_s - rank);
    }

    // Orthonormalize against the exact sphere inner product via Cholesky.
    const int k = static_cast<int>(kernel.cols());
    Eigen::MatrixXcd gram_mono(dim_s, dim_s);
    for (int i = 0; i < dim_s; ++i)
        for (int j = 0; j < dim_s; ++j) gram_mono(i, j) = sphere_inner(mono[i], mono[j]);
    Eigen::MatrixXcd G = kernel.adjoint() * gram_mono * kernel;
    Eigen::LLT<Eigen::MatrixXcd> llt(G);
    Eigen::MatrixXcd L = llt.matrixL();
    Eigen::MatrixXcd B = kernel * L.inverse().adjoint();

    HarmonicBasis out;
    out.n = n;
    out.p = p;
    out.q = q;
    out.elements.reserve(k);
    for (int j = 0; j < k; ++j) {
        BigradedPoly P(n, p, q);
        for (int i = 0; i < dim_s; ++i) {
            cplx c = B(i, j);
            if (std::abs(c) > 1e-14) {
                const Monomial& m = mono[i].terms()[0];
                P.add_term(m.a, m.b, c);
            }
        }
        P.sort_terms();
        out.elements.push_back(P);
    }
    return out;
}

// expected cardinality dim s^{p,q} - dim s^{p-1,q-1}
inline int harmonic_dimension(int n, int p, int q) {
    auto dim_s = [n](int p_, int q_) {
        if (p_ < 0 || q_ < 0) return 0;
        auto ch = [n](int d) {
            long r = 1;
            for (int i = 1; i <= n - 1; ++i) r = r * (d + i) / i;
            return static_cast<int>(r);
        };
        return ch(p_) * ch(q_);
    };
    return dim_s(p, q) - dim_s(p - 1, q - 1);
}

// ---------------------------------------------------------------------------
// Pointwise evaluation on the sphere and eigenvalue formulas.
// ---------------------------------------------------------------------------
inline cplx restrict_eval(const BigradedPoly& P, const std::vector<cplx>& xi) {
    double r2 = 0.0;
    for (const auto& z : xi) r2 += std::norm(z);
    if (std::abs(r2 - 1.0) > 1e-12) throw NotUnit("restrict_eval: point is not on the unit sphere");
    return P.eval_point(xi);
}

// horizontal Laplacian eigenvalue on h^{p,q}
inline double lambda_pq(int n, int p, int q) {
    double d = p + q;
    return d * (d + 2.0 * n - 2.0) - (p - q) * (p - q);
}

// second-variation eigenvalue on h^{p,q}, up to the global positive factor
inline double mu_pq(int n, int p, int q) {
    if (p + q <= 0) throw ZeroBidegree("mu_pq: requires p+q > 0");
    return -static_cast<double>((p - 1)) * (q - 1) * (p + n) * (q + n);
}

// Lie derivative along the circle-action generator: exact i(p-q) P.
inline BigradedPoly vertical_derivative(const BigradedPoly& P) {
    BigradedPoly r = P;
    r *= cplx(0.0, static_cast<double>(P.p() - P.q()));
    return r;
}

// flow-based finite-difference variant, for cross-checks: d/dt P(e^{it} xi)
inline cplx vertical_derivative_fd(const BigradedPoly& P, const std::vector<cplx>& xi, double step = 1e-4) {
    auto rotate = [&](double t) {
        std::vector<cplx> r(xi.size());
        cplx w = std::polar(1.0, t);
        for (size_t i = 0; i < xi.size(); ++i) r[i] = w * xi[i];
        return r;
    };
    cplx plus = P.eval_point(rotate(step));
    cplx minus = P.eval_point(rotate(-step));
    return (plus - minus) / (2.0 * step);
}

} // namespace pshvol
