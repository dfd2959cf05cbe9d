#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pshvol/errors.hpp"

namespace pshvol {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Index bookkeeping. A strictly increasing index tuple on a d-dimensional
// space (d <= 6) is stored as a bitmask; coefficients are kept dense in
// lexicographic mask order.
// ---------------------------------------------------------------------------
namespace detail {

inline int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return static_cast<int>(r);
}

struct MaskTable {
    std::vector<std::uint8_t> masks;      // all masks of given popcount, ascending
    std::array<int, 64> rank{};           // mask -> position in `masks`
};

inline const MaskTable& mask_table(int dim, int degree) {
    static MaskTable tables[7][7];
    static bool built = false;
    if (!built) {
        for (int d = 0; d <= 6; ++d)
            for (int k = 0; k <= d; ++k) {
                MaskTable& t = tables[d][k];
                t.rank.fill(-1);
                for (int m = 0; m < (1 << d); ++m)
                    if (std::popcount(static_cast<unsigned>(m)) == k) {
                        t.rank[m] = static_cast<int>(t.masks.size());
                        t.masks.push_back(static_cast<std::uint8_t>(m));
                    }
            }
        built = true;
    }
    return tables[dim][degree];
}

// Sign of merging two disjoint increasing tuples a, b into sorted order:
// parity of #{(i,j) : i in a, j in b, i > j}.
inline int merge_sign(unsigned a, unsigned b) {
    int inv = 0;
    while (b) {
        unsigned low = b & (~b + 1u); // lowest set bit of b
        int pos = std::countr_zero(low);
        inv += std::popcount(a >> (pos + 1));
        b &= b - 1u;
    }
    return (inv & 1) ? -1 : 1;
}

} // namespace detail

// ---------------------------------------------------------------------------
// FormVector: a (possibly complexified) tangent vector.
// ---------------------------------------------------------------------------
struct FormVector {
    int dim = 0;
    std::vector<cplx> c;

    FormVector() = default;
    explicit FormVector(int d) : dim(d), c(d, cplx(0.0)) {}
    FormVector(std::initializer_list<cplx> xs) : dim(static_cast<int>(xs.size())), c(xs) {}

    static FormVector basis(int dim, int i) {
        FormVector v(dim);
        v.c[i] = 1.0;
        return v;
    }
    static FormVector real(const std::vector<double>& xs) {
        FormVector v(static_cast<int>(xs.size()));
        for (size_t i = 0; i < xs.size(); ++i) v.c[i] = xs[i];
        return v;
    }
};

// ---------------------------------------------------------------------------
// AlternatingForm: degree-k antisymmetric multilinear form over a fixed
// tangent space of real dimension dim <= 6, with complex coefficients.
// Evaluation follows the determinant convention (no 1/k!), wedge the shuffle
// convention.
// ---------------------------------------------------------------------------
class AlternatingForm {
  public:
    AlternatingForm() = default;
    AlternatingForm(int dim, int degree)
        : dim_(dim), degree_(degree), c_(detail::binom(dim, degree), cplx(0.0)) {
        if (dim < 0 || dim > 6 || degree < 0 || degree > dim)
            throw DimensionMismatch("AlternatingForm: dim/degree out of range");
    }

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(c_.size()); }

    cplx& coeff_by_rank(int r) { return c_[r]; }
    const cplx& coeff_by_rank(int r) const { return c_[r]; }

    cplx coeff(unsigned mask) const {
        int r = detail::mask_table(dim_, degree_).rank[mask];
        return c_[r];
    }
    void set_coeff(unsigned mask, cplx v) {
        int r = detail::mask_table(dim_, degree_).rank[mask];
        c_[r] = v;
    }
    unsigned mask_of_rank(int r) const { return detail::mask_table(dim_, degree_).masks[r]; }

    static AlternatingForm basis_covector(int dim, int i) {
        AlternatingForm a(dim, 1);
        a.set_coeff(1u << i, 1.0);
        return a;
    }
    static AlternatingForm one_form(const std::vector<cplx>& comps) {
        AlternatingForm a(static_cast<int>(comps.size()), 1);
        for (size_t i = 0; i < comps.size(); ++i) a.set_coeff(1u << i, comps[i]);
        return a;
    }
    static AlternatingForm constant(int dim, cplx value) {
        AlternatingForm a(dim, 0);
        a.set_coeff(0, value);
        return a;
    }
    static AlternatingForm top(int dim, cplx density) {
        AlternatingForm a(dim, dim);
        a.set_coeff((1u << dim) - 1u, density);
        return a;
    }

    AlternatingForm& operator+=(const AlternatingForm& b) {
        check_same(b);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
        return *this;
    }
    AlternatingForm& operator-=(const AlternatingForm& b) {
        check_same(b);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
        return *this;
    }
    AlternatingForm& operator*=(cplx s) {
        for (auto& x : c_) x *= s;
        return *this;
    }

    friend AlternatingForm operator+(AlternatingForm a, const AlternatingForm& b) { return a += b; }
    friend AlternatingForm operator-(AlternatingForm a, const AlternatingForm& b) { return a -= b; }
    friend AlternatingForm operator*(AlternatingForm a, cplx s) { return a *= s; }
    friend AlternatingForm operator*(cplx s, AlternatingForm a) { return a *= s; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : c_) m = std::max(m, std::abs(x));
        return m;
    }

  private:
    void check_same(const AlternatingForm& b) const {
        if (dim_ != b.dim_ || degree_ != b.degree_)
            throw DimensionMismatch("AlternatingForm: mismatched dim/degree");
    }

    int dim_ = 0;
    int degree_ = 0;
    std::vector<cplx> c_;
};

inline AlternatingForm conj(const AlternatingForm& a) {
    AlternatingForm r(a.dim(), a.degree());
    for (int i = 0; i < a.size(); ++i) r.coeff_by_rank(i) = std::conj(a.coeff_by_rank(i));
    return r;
}

// Antisymmetrized product with the standard shuffle sign convention.
inline AlternatingForm wedge(const AlternatingForm& a, const AlternatingForm& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("wedge: dimension mismatch");
    if (a.degree() + b.degree() > a.dim()) throw DegreeOverflow("wedge: degree exceeds dimension");
    AlternatingForm r(a.dim(), a.degree() + b.degree());
    for (int i = 0; i < a.size(); ++i) {
        cplx ca = a.coeff_by_rank(i);
        if (ca == cplx(0.0)) continue;
        unsigned ma = a.mask_of_rank(i);
        for (int j = 0; j < b.size(); ++j) {
            cplx cb = b.coeff_by_rank(j);
            if (cb == cplx(0.0)) continue;
            unsigned mb = b.mask_of_rank(j);
            if (ma & mb) continue;
            int s = detail::merge_sign(ma, mb);
            r.set_coeff(ma | mb, r.coeff(ma | mb) + static_cast<double>(s) * ca * cb);
        }
    }
    return r;
}

inline AlternatingForm wedge_power(const AlternatingForm& a, int k) {
    AlternatingForm r = AlternatingForm::constant(a.dim(), 1.0);
    for (int i = 0; i < k; ++i) r = wedge(r, a);
    return r;
}

// Interior product i_v a; degree drops by one.
inline AlternatingForm contract(const FormVector& v, const AlternatingForm& a) {
    if (v.dim != a.dim()) throw DimensionMismatch("contract: dimension mismatch");
    if (a.degree() < 1) throw DimensionMismatch("contract: form of degree zero");
    AlternatingForm r(a.dim(), a.degree() - 1);
    for (int i = 0; i < a.size(); ++i) {
        cplx ca = a.coeff_by_rank(i);
        if (ca == cplx(0.0)) continue;
        unsigned m = a.mask_of_rank(i);
        unsigned rest = m;
        while (rest) {
            unsigned low = rest & (~rest + 1u);
            int pos = std::countr_zero(low);
            rest &= rest - 1u;
            cplx vp = v.c[pos];
            if (vp == cplx(0.0)) continue;
            // sign: (-1)^(number of indices in m below pos)
            int below = std::popcount(m & (low - 1u));
            double s = (below & 1) ? -1.0 : 1.0;
            unsigned mj = m & ~low;
            r.set_coeff(mj, r.coeff(mj) + s * vp * ca);
        }
    }
    return r;
}

// Full antisymmetric multilinear evaluation on a frame of deg(a) vectors.
inline cplx evaluate_on_frame(const AlternatingForm& a, const std::vector<FormVector>& frame) {
    if (static_cast<int>(frame.size()) != a.degree())
        throw DimensionMismatch("evaluate_on_frame: frame length must equal degree");
    for (const auto& v : frame)
        if (v.dim != a.dim()) throw DimensionMismatch("evaluate_on_frame: vector dimension mismatch");
    AlternatingForm cur = a;
    for (const auto& v : frame) cur = contract(v, cur);
    return cur.coeff_by_rank(0);
}

// The unique scalar c with top = c * reference, both of top degree.
inline cplx density_ratio(const AlternatingForm& top, const AlternatingForm& reference) {
    if (top.dim() != reference.dim() || top.degree() != top.dim() || reference.degree() != reference.dim())
        throw DimensionMismatch("density_ratio: both forms must be of top degree on the same space");
    cplx ref = reference.coeff_by_rank(0);
    if (std::abs(ref) < 1e-300) throw ZeroReference("density_ratio: zero reference form");
    return top.coeff_by_rank(0) / ref;
}

// Pullback of a along the linear map sending basis vector e_i of the source
// to vectors[i]; also serves to restrict ambient forms to a tangent frame.
inline AlternatingForm pullback(const AlternatingForm& a, const std::vector<FormVector>& vectors) {
    int d = static_cast<int>(vectors.size());
    if (d > 6) throw DimensionMismatch("pullback: target dimension exceeds 6");
    if (a.degree() > d) throw DegreeOverflow("pullback: degree exceeds target dimension");
    AlternatingForm r(d, a.degree());
    const auto& table = detail::mask_table(d, a.degree());
    for (size_t t = 0; t < table.masks.size(); ++t) {
        unsigned m = table.masks[t];
        std::vector<FormVector> sel;
        sel.reserve(a.degree());
        unsigned rest = m;
        while (rest) {
            int pos = std::countr_zero(rest & (~rest + 1u));
            sel.push_back(vectors[pos]);
            rest &= rest - 1u;
        }
        r.coeff_by_rank(static_cast<int>(t)) = evaluate_on_frame(a, sel);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Complex coordinate scaffolding on C^n, real dimension 2n. Real basis order
// is interleaved: index 2a is x_{a+1}, index 2a+1 is y_{a+1}, so the standard
// volume is dx_1 dy_1 ... dx_n dy_n = top form with density 1.
// ---------------------------------------------------------------------------
inline AlternatingForm dz_form(int n, int a) {
    AlternatingForm f(2 * n, 1);
    f.set_coeff(1u << (2 * a), 1.0);
    f.set_coeff(1u << (2 * a + 1), cplx(0.0, 1.0));
    return f;
}

inline AlternatingForm dzbar_form(int n, int a) { return conj(dz_form(n, a)); }

// Holomorphic n-form dz_1 ^ ... ^ dz_n
inline AlternatingForm holomorphic_volume(int n) {
    AlternatingForm f = AlternatingForm::constant(2 * n, 1.0);
    for (int a = 0; a < n; ++a) f = wedge(f, dz_form(n, a));
    return f;
}

// c_n = 2^{-n} i^{n^2}, so that c_n dz^n ^ dzbar^n is the standard volume.
inline cplx cy_constant(int n) {
    static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    return std::pow(0.5, n) * ipow[(n * n) % 4];
}

inline AlternatingForm standard_volume(int n) { return AlternatingForm::top(2 * n, 1.0); }

} // namespace pshvol
