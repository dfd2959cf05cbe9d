#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "pshvol/alt_forms.hpp"
#include "pshvol/quadrature.hpp"

namespace pshvol {

using RVec = std::vector<double>;

inline double dot(const RVec& a, const RVec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const RVec& a) { return std::sqrt(dot(a, a)); }

inline RVec node_vec(const Node& x, int d) {
    RVec v(d);
    for (int i = 0; i < d; ++i) v[i] = x[i];
    return v;
}

// determinant of a small dense matrix given by column vectors (d <= 6)
inline double det_columns(const std::vector<RVec>& cols) {
    int d = static_cast<int>(cols.size());
    std::array<std::array<double, 6>, 6> m{};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) m[i][j] = cols[j][i];
    double det = 1.0;
    for (int k = 0; k < d; ++k) {
        int piv = k;
        for (int i = k + 1; i < d; ++i)
            if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
        if (piv != k) {
            std::swap(m[piv], m[k]);
            det = -det;
        }
        if (m[k][k] == 0.0) return 0.0;
        det *= m[k][k];
        for (int i = k + 1; i < d; ++i) {
            double f = m[i][k] / m[k][k];
            for (int j = k; j < d; ++j) m[i][j] -= f * m[k][j];
        }
    }
    return det;
}

// Oriented orthonormal frame of T_xi S^{d-1}. Patch selection drops the
// coordinate axis most aligned with xi, then Gram-Schmidt; the last vector is
// flipped if needed so that (xi, u_1, ..., u_{d-1}) is positively oriented.
// Frame choice cancels in all densities.
struct TangentFrame {
    RVec xi;                 // base point (unit)
    std::vector<RVec> u;     // d-1 orthonormal tangent vectors, positively oriented
};

inline TangentFrame tangent_frame(const RVec& xi) {
    const int d = static_cast<int>(xi.size());
    int drop = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(xi[i]) > std::abs(xi[drop])) drop = i;

    TangentFrame fr;
    fr.xi = xi;
    for (int i = 0; i < d; ++i) {
        if (i == drop) continue;
        RVec v(d, 0.0);
        v[i] = 1.0;
        double p = dot(v, xi);
        for (int k = 0; k < d; ++k) v[k] -= p * xi[k];
        for (const auto& w : fr.u) {
            double q = dot(v, w);
            for (int k = 0; k < d; ++k) v[k] -= q * w[k];
        }
        double nv = norm(v);
        for (int k = 0; k < d; ++k) v[k] /= nv;
        fr.u.push_back(v);
    }

    std::vector<RVec> cols;
    cols.push_back(xi);
    for (const auto& w : fr.u) cols.push_back(w);
    if (det_columns(cols) < 0.0)
        for (int k = 0; k < d; ++k) fr.u.back()[k] = -fr.u.back()[k];
    return fr;
}

// Chart around xi: sigma(s) = normalize(xi + sum_i s_i u_i). At s = 0 the
// chart coordinate vectors are exactly the frame vectors u_i.
struct SphereChart {
    TangentFrame fr;

    RVec point(const RVec& s) const {
        const int d = static_cast<int>(fr.xi.size());
        RVec p = fr.xi;
        for (size_t i = 0; i < fr.u.size(); ++i)
            for (int k = 0; k < d; ++k) p[k] += s[i] * fr.u[i][k];
        double np = norm(p);
        for (int k = 0; k < d; ++k) p[k] /= np;
        return p;
    }

    // analytic derivative of the chart map: d sigma_s (e_i)
    std::vector<RVec> frame_at(const RVec& s) const {
        const int d = static_cast<int>(fr.xi.size());
        RVec raw = fr.xi;
        for (size_t i = 0; i < fr.u.size(); ++i)
            for (int k = 0; k < d; ++k) raw[k] += s[i] * fr.u[i][k];
        double nr = norm(raw);
        RVec p(d);
        for (int k = 0; k < d; ++k) p[k] = raw[k] / nr;
        std::vector<RVec> out;
        out.reserve(fr.u.size());
        for (size_t i = 0; i < fr.u.size(); ++i) {
            double c = dot(fr.u[i], p);
            RVec v(d);
            for (int k = 0; k < d; ++k) v[k] = (fr.u[i][k] - c * p[k]) / nr;
            out.push_back(v);
        }
        return out;
    }
};

} // namespace pshvol
