#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pshvol/alt_forms.hpp"
#include "pshvol/errors.hpp"
#include "pshvol/frames.hpp"
#include "pshvol/harmonics.hpp"
#include "pshvol/hypersurface.hpp"
#include "pshvol/quadrature.hpp"
#include "pshvol/rng.hpp"

namespace pshvol {

// ===========================================================================
// Finite-difference derivatives of R(M_{t f}) with Richardson extrapolation.
// ===========================================================================
struct DerivativeEstimate {
    double value = 0.0;
    double error = 0.0; // Richardson error estimate plus a roundoff floor
};

inline DerivativeEstimate derivative_R(const RadialGraph& base, const RadialGraph& direction, int order,
                                       const SphereRule& rule, double step,
                                       NuRoute route = NuRoute::levi) {
    auto R_at = [&](double t) {
        RadialGraph g = graph_sum(base, direction, t);
        auto rep = pseudoconvexity_check(g, rule);
        if (!rep.certified)
            throw NotPseudoconvex("derivative_R: probe surface at t=" + std::to_string(t) +
                                  " fails the Levi check at node " + std::to_string(rep.worst_node));
        return functional_R(g, rule, route);
    };
    double R0 = R_at(0.0);
    double h = step;
    double Rp = R_at(h), Rm = R_at(-h);
    double Rp2 = R_at(0.5 * h), Rm2 = R_at(-0.5 * h);

    DerivativeEstimate est;
    if (order == 1) {
        double d1 = (Rp - Rm) / (2.0 * h);
        double d2 = (Rp2 - Rm2) / h;
        est.value = (4.0 * d2 - d1) / 3.0;
        est.error = std::abs(d2 - d1) / 3.0 + 1e-13 * std::abs(R0) / h;
    } else if (order == 2) {
        double d1 = (Rp - 2.0 * R0 + Rm) / (h * h);
        double d2 = (Rp2 - 2.0 * R0 + Rm2) / (0.25 * h * h);
        est.value = (4.0 * d2 - d1) / 3.0;
        est.error = std::abs(d2 - d1) / 3.0 + 4e-13 * std::abs(R0) / (h * h);
    } else {
        throw Error("derivative_R: order must be 1 or 2");
    }
    return est;
}

// ===========================================================================
// Second variation about the round sphere.
// ===========================================================================

// the absolute normalization of the quadratic form per unit ||f||^2
inline double q_normalization(int n) {
    return 2.0 * n / ((n + 1.0) * (n + 1.0) * sphere_volume(n));
}

struct QMeasurement {
    double value = 0.0;
    double error = 0.0;
};

// Q(f) from R(M_{tf}) = R(S)(1 + t^2 Q + ...)
inline QMeasurement measured_Q(const RadialGraph& direction, const SphereRule& rule, double step,
                               NuRoute route = NuRoute::levi) {
    RadialGraph sphere;
    sphere.n = direction.n;
    auto d2 = derivative_R(sphere, direction, 2, rule, step, route);
    double R0 = sphere_R(direction.n);
    return {d2.value / (2.0 * R0), d2.error / (2.0 * R0)};
}

inline double predicted_Q(int n, int p, int q, double f_norm2) {
    return q_normalization(n) * mu_pq(n, p, q) * f_norm2;
}

// exact ||Re P||^2 or ||Im P||^2 over the sphere
inline double real_part_norm2(const BigradedPoly& P, bool imag_part) {
    double herm = sphere_inner(P, P).real();
    double bil = integral_product(P, P).real();
    return imag_part ? 0.5 * (herm - bil) : 0.5 * (herm + bil);
}

struct VariationResult {
    int n = 2, p = 0, q = 0;
    bool imag_part = false;
    int basis_index = 0;
    double f_norm2 = 0.0;
    double dR_dt = 0.0, dR_err = 0.0;
    double Q_measured = 0.0, Q_err = 0.0;
    double Q_predicted = 0.0;
    double ratio = 0.0; // measured/predicted where predicted != 0
    bool flagged = false;
};

struct SpectrumReport {
    std::vector<VariationResult> rows;
    double q22_per_norm = 0.0; // |measured Q| per unit norm on h^{2,2}, the null-direction yardstick
    bool any_flagged = false;
};

// picks the re/im part of the first basis element with the larger norm
inline RadialGraph spectrum_direction(int n, int p, int q, int basis_index, bool& imag_out,
                                      double& norm2_out, int degree_cap = 6) {
    auto basis = harmonic_basis(n, p, q, degree_cap);
    const auto& P = basis.elements[basis_index];
    double nre = real_part_norm2(P, false);
    double nim = real_part_norm2(P, true);
    bool use_im = nim > nre;
    imag_out = use_im;
    norm2_out = use_im ? nim : nre;
    RadialGraph dir;
    dir.n = n;
    dir.terms.push_back({use_im, 1.0, P});
    return dir;
}

inline SpectrumReport spectrum_report(int n, const std::vector<std::pair<int, int>>& bidegrees,
                                      const SphereRule& rule, double step, double cnorm_scale = 1.0,
                                      double ratio_tol = 0.02, double null_frac = 0.05) {
    SpectrumReport report;
    report.rows.reserve(bidegrees.size());

    // yardstick: measured Q per unit norm on h^{2,2}
    {
        bool im;
        double norm2;
        RadialGraph dir = spectrum_direction(n, 2, 2, 0, im, norm2);
        auto qm = measured_Q(dir, rule, step);
        report.q22_per_norm = std::abs(qm.value) / norm2;
    }

    RadialGraph sphere;
    sphere.n = n;
    for (auto [p, q] : bidegrees) {
        VariationResult row;
        row.n = n;
        row.p = p;
        row.q = q;
        RadialGraph dir = spectrum_direction(n, p, q, 0, row.imag_part, row.f_norm2);
        auto d1 = derivative_R(sphere, dir, 1, rule, step);
        row.dR_dt = d1.value;
        row.dR_err = d1.error;
        auto qm = measured_Q(dir, rule, step);
        row.Q_measured = qm.value;
        row.Q_err = qm.error;
        row.Q_predicted = cnorm_scale * predicted_Q(n, p, q, row.f_norm2);
        if (row.Q_predicted != 0.0) {
            row.ratio = row.Q_measured / row.Q_predicted;
            row.flagged = std::abs(row.ratio - 1.0) > ratio_tol;
        } else {
            row.ratio = 0.0;
            row.flagged = std::abs(row.Q_measured) > null_frac * report.q22_per_norm * row.f_norm2;
        }
        report.any_flagged = report.any_flagged || row.flagged;
        report.rows.push_back(row);
    }
    return report;
}

inline std::vector<std::pair<int, int>> all_bidegrees(int max_total) {
    std::vector<std::pair<int, int>> out;
    for (int d = 1; d <= max_total; ++d)
        for (int p = d; p >= 0; --p) out.push_back({p, d - p});
    return out;
}

// ===========================================================================
// Canonical factorization of the restricted holomorphic volume form,
//   Psi|_M = theta ^ chi,  i_v chi = 0,  theta(v) = 1,  i_v dtheta = 0,
// with theta normalized so that
//   theta ^ (dtheta)^{n-1} = 2^{n-1} (n-1)! c_{n-1} theta ^ chi ^ chibar.
// With this convention the round sphere carries the standard contact form
// (phi = 1) and c_{n-1} theta ^ chi ^ chibar is the volume density nu.
// ===========================================================================
struct FactorizationData {
    RVec xi;
    TangentFrame fr;          // ONB of T_xi S; all forms below live in this basis
    double phi = 1.0;         // conformal factor against theta_0 = -(I dF)|_TM
    AlternatingForm theta;    // contact 1-form
    AlternatingForm dtheta;   // its exterior derivative (includes dphi ^ theta_0)
    FormVector reeb;          // v with theta(v) = 1, i_v dtheta = 0
    AlternatingForm chi;      // complex (n-1)-form, i_v chi = 0
    AlternatingForm alpha;    // Re chi
    AlternatingForm beta;     // Im chi
    AlternatingForm nu;       // c_{n-1} theta ^ chi ^ chibar (top form)
    double nu_density = 0.0;  // against the round volume at xi
};

namespace detail_var {

struct RestrictedPieces {
    SurfacePoint sp;
    AlternatingForm theta0;  // -(I dF) restricted
    AlternatingForm dtheta0; // -d(I dF) restricted
    AlternatingForm psi;     // holomorphic volume restricted (complex)
};

inline RestrictedPieces restricted_pieces(const RadialGraph& g, const RVec& xi) {
    RestrictedPieces rp{surface_point(g, xi), {}, {}, {}};
    const AmbientJet& jet = rp.sp.jet;
    const int n = g.n;
    const int d = 2 * n;
    const int m = d - 1;

    RVec gam(d);
    for (int a = 0; a < n; ++a) {
        gam[2 * a] = jet.grad_real[2 * a + 1];
        gam[2 * a + 1] = -jet.grad_real[2 * a];
    }
    auto dgam = [&](int k, int l) {
        int a = l / 2;
        return (l % 2 == 0) ? jet.hess_real[k][2 * a + 1] : -jet.hess_real[k][2 * a];
    };

    AlternatingForm th(m, 1), dth(m, 2);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += gam[k] * rp.sp.t[i][k];
        th.set_coeff(1u << i, -s);
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) s += (dgam(k, l) - dgam(l, k)) * rp.sp.t[i][k] * rp.sp.t[j][l];
            dth.set_coeff((1u << i) | (1u << j), -s);
        }
    rp.theta0 = th;
    rp.dtheta0 = dth;

    std::vector<FormVector> tf;
    for (const auto& t : rp.sp.t) {
        FormVector v(d);
        for (int k = 0; k < d; ++k) v.c[k] = t[k];
        tf.push_back(v);
    }
    rp.psi = pullback(holomorphic_volume(n), tf);
    return rp;
}

inline FormVector reeb_from(const AlternatingForm& theta, const AlternatingForm& dtheta) {
    const int m = theta.dim();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double v = dtheta.coeff((1u << i) | (1u << j)).real();
            K(i, j) = v;
            K(j, i) = -v;
        }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(m - 2) / sv(0) < 1e-8)
        throw SingularReebSolve("reeb_from: dtheta degenerate on the contact distribution");
    Eigen::VectorXd k = svd.matrixV().col(m - 1);
    FormVector v(m);
    cplx tk = 0.0;
    for (int i = 0; i < m; ++i) tk += theta.coeff(1u << i) * k(i);
    if (std::abs(tk) < 1e-12) throw SingularReebSolve("reeb_from: theta vanishes on the kernel of dtheta");
    for (int i = 0; i < m; ++i) v.c[i] = k(i) / tk.real();
    return v;
}

// normalization ratio phi^{n+1} at a point; shares all pointwise work
inline double phi_power(const RestrictedPieces& rp, int n) {
    FormVector v0 = reeb_from(rp.theta0, rp.dtheta0);
    AlternatingForm chi0 = contract(v0, rp.psi);
    double fact = 1.0;
    for (int i = 2; i <= n - 1; ++i) fact *= i;
    AlternatingForm num =
        std::pow(2.0, n - 1) * fact * cy_constant(n - 1) * wedge(rp.theta0, wedge(chi0, conj(chi0)));
    AlternatingForm den = wedge(rp.theta0, wedge_power(rp.dtheta0, n - 1));
    double ratio = (num.coeff_by_rank(0) / den.coeff_by_rank(0)).real();
    if (!(ratio > 0.0))
        throw NotPseudoconvex("canonical_factorization: nonpositive normalization ratio");
    return ratio;
}

inline double phi_at(const RadialGraph& g, const RVec& xi) {
    RestrictedPieces rp = restricted_pieces(g, xi);
    return std::pow(phi_power(rp, g.n), 1.0 / (g.n + 1));
}

} // namespace detail_var

struct FdConfig {
    double chart_step = 1e-4;
    bool self_check = true;
    double self_check_tol = 5e-2; // relative mismatch between steps h and h/2
};

// gradient of a scalar field on the sphere, as a 1-form in the frame basis
template <typename FieldFn>
AlternatingForm chart_gradient(const FieldFn& field, const TangentFrame& fr, double step) {
    const int m = static_cast<int>(fr.u.size());
    SphereChart chart{fr};
    AlternatingForm df(m, 1);
    for (int i = 0; i < m; ++i) {
        RVec sp(m, 0.0), sm(m, 0.0);
        sp[i] = step;
        sm[i] = -step;
        double fp = field(chart.point(sp));
        double fm = field(chart.point(sm));
        df.set_coeff(1u << i, (fp - fm) / (2.0 * step));
    }
    return df;
}

inline FactorizationData canonical_factorization(const RadialGraph& g, const RVec& xi,
                                                 const FdConfig& fd = {}) {
    const int n = g.n;
    detail_var::RestrictedPieces rp = detail_var::restricted_pieces(g, xi);

    FactorizationData out;
    out.xi = xi;
    out.fr = rp.sp.fr;
    out.phi = std::pow(detail_var::phi_power(rp, n), 1.0 / (n + 1));

    AlternatingForm dphi = chart_gradient(
        [&](const RVec& y) { return detail_var::phi_at(g, y); }, rp.sp.fr, fd.chart_step);

    out.theta = out.phi * rp.theta0;
    out.dtheta = out.phi * rp.dtheta0 + wedge(dphi, rp.theta0);
    out.reeb = detail_var::reeb_from(out.theta, out.dtheta);
    out.chi = contract(out.reeb, rp.psi);

    const int m = 2 * n - 1;
    out.alpha = AlternatingForm(m, n - 1);
    out.beta = AlternatingForm(m, n - 1);
    for (int i = 0; i < out.chi.size(); ++i) {
        out.alpha.coeff_by_rank(i) = out.chi.coeff_by_rank(i).real();
        out.beta.coeff_by_rank(i) = out.chi.coeff_by_rank(i).imag();
    }
    out.nu = cy_constant(n - 1) * wedge(out.theta, wedge(out.chi, conj(out.chi)));
    out.nu_density = out.nu.coeff_by_rank(0).real();
    return out;
}

// ===========================================================================
// Exterior derivatives of pipeline-defined form fields by central differences
// along chart directions, with a halving self-check. The field callback
// returns the form in the tangent frame of the query point; coefficients are
// rebased onto the chart coordinate frame before differencing.
// ===========================================================================
inline RVec frame_coords(const TangentFrame& fr, const RVec& w) {
    RVec c(fr.u.size(), 0.0);
    for (size_t i = 0; i < fr.u.size(); ++i) c[i] = dot(fr.u[i], w);
    return c;
}

struct FieldSample {
    TangentFrame fr;
    AlternatingForm form; // in fr's basis
};

template <typename FieldFn>
AlternatingForm chart_exterior_derivative(const FieldFn& field, const TangentFrame& base_fr, double step,
                                          const FdConfig& fd = {}) {
    const int m = static_cast<int>(base_fr.u.size());
    SphereChart chart{base_fr};

    FieldSample center = field(base_fr.xi);
    const int k = center.form.degree();

    // coefficient table a_J(+-h e_i) on the chart frame
    auto coeffs_at = [&](const RVec& s) {
        FieldSample fs = field(chart.point(s));
        auto chart_vecs = chart.frame_at(s);
        std::vector<FormVector> fv;
        fv.reserve(m);
        for (const auto& w : chart_vecs) {
            RVec c = frame_coords(fs.fr, w);
            FormVector v(m);
            for (int i = 0; i < m; ++i) v.c[i] = c[i];
            fv.push_back(v);
        }
        return pullback(fs.form, fv);
    };

    auto d_at_step = [&](double h) {
        std::vector<AlternatingForm> dplus, dminus;
        AlternatingForm result(m, k + 1);
        std::vector<AlternatingForm> deriv; // partial_i of the coefficient form
        deriv.reserve(m);
        for (int i = 0; i < m; ++i) {
            RVec sp(m, 0.0), sm(m, 0.0);
            sp[i] = h;
            sm[i] = -h;
            AlternatingForm cp = coeffs_at(sp);
            AlternatingForm cm = coeffs_at(sm);
            deriv.push_back((cp - cm) * cplx(1.0 / (2.0 * h)));
        }
        // (d omega)_K = sum_j (-1)^j d_{i_j} omega_{K minus i_j}
        for (int r = 0; r < result.size(); ++r) {
            unsigned K = result.mask_of_rank(r);
            cplx acc = 0.0;
            unsigned rest = K;
            int j = 0;
            while (rest) {
                unsigned low = rest & (~rest + 1u);
                int i = std::countr_zero(low);
                rest &= rest - 1u;
                double sgn = (j % 2) ? -1.0 : 1.0;
                acc += sgn * deriv[i].coeff(K & ~low);
                ++j;
            }
            result.coeff_by_rank(r) = acc;
        }
        return result;
    };

    AlternatingForm d1 = d_at_step(step);
    AlternatingForm d2 = d_at_step(0.5 * step);
    AlternatingForm rich = d2 * cplx(4.0 / 3.0) - d1 * cplx(1.0 / 3.0);
    if (fd.self_check) {
        double scale = std::max(d2.max_abs(), 1e-6);
        if ((d2 - d1).max_abs() > fd.self_check_tol * scale)
            throw FlowStepUnstable("chart_exterior_derivative: halving self-check failed");
    }
    return rich;
}

// Lie derivative of chi along the Reeb field via Cartan (i_v chi = 0, so
// L_v chi = i_v d(chi)); alpha/beta parts are its real and imaginary parts.
inline AlternatingForm lie_reeb_chi(const RadialGraph& g, const FactorizationData& fac,
                                    const FdConfig& fd = {}) {
    auto field = [&](const RVec& y) {
        FactorizationData f = canonical_factorization(g, y, fd);
        return FieldSample{f.fr, f.chi};
    };
    AlternatingForm dchi = chart_exterior_derivative(field, fac.fr, fd.chart_step, fd);
    return contract(fac.reeb, dchi);
}

// ===========================================================================
// Mean curvature density h: the first-variation identity deltaA = int f h nu
// fixes sign and constant once, on the round sphere; the conventions below
// satisfy it (h = 2n^2/(n+1) on the round sphere).
// ===========================================================================
inline double mean_curvature_coefficient(int n) {
    return (n % 2) ? -std::pow(2.0, 3 - n) * n / (n + 1.0)  // n odd
                   : -std::pow(2.0, 2 - n) * n / (n + 1.0); // n even
}

inline double mean_curvature_h(const RadialGraph& g, const RVec& xi, const FdConfig& fd = {}) {
    FactorizationData fac = canonical_factorization(g, xi, fd);
    AlternatingForm lchi = lie_reeb_chi(g, fac, fd);
    const int m = 2 * g.n - 1;
    AlternatingForm lalpha(m, g.n - 1), lbeta(m, g.n - 1);
    for (int i = 0; i < lchi.size(); ++i) {
        lalpha.coeff_by_rank(i) = lchi.coeff_by_rank(i).real();
        lbeta.coeff_by_rank(i) = lchi.coeff_by_rank(i).imag();
    }
    AlternatingForm hnu(m, m);
    if (g.n % 2) {
        hnu = wedge(fac.beta, wedge(lalpha, fac.theta));
    } else {
        hnu = wedge(fac.alpha, wedge(lalpha, fac.theta)) + wedge(fac.beta, wedge(lbeta, fac.theta));
    }
    hnu *= mean_curvature_coefficient(g.n);
    return density_ratio(hnu, fac.nu).real();
}

// ===========================================================================
// Sasaki-Einstein residuals on M^5: least-squares lambda with
//   gamma_1 = L_v alpha - lambda beta,  gamma_2 = L_v beta + lambda alpha.
// ===========================================================================
struct SasakiEinsteinReport {
    double lambda = 0.0;          // fitted
    double gamma1_rel = 0.0;      // ||gamma_1|| / ||alpha||
    double gamma2_rel = 0.0;      // ||gamma_2|| / ||beta||
    double h_mean = 0.0;          // mean of the curvature density
    double h_spread = 0.0;        // relative spread across nodes
    double lambda_from_h = 0.0;   // companion value 8 h / 3, reported for comparison
};

inline SasakiEinsteinReport sasaki_einstein_residuals(const RadialGraph& g, const SphereRule& rule,
                                                      const FdConfig& fd = {}) {
    if (g.n != 3) throw Error("sasaki_einstein_residuals: only defined for n = 3");
    double num = 0.0, den = 0.0;
    struct NodeData {
        double w;
        AlternatingForm alpha, beta, lalpha, lbeta;
        double h;
    };
    std::vector<NodeData> data;
    data.reserve(rule.count());

    auto dotf = [](const AlternatingForm& a, const AlternatingForm& b) {
        double s = 0.0;
        for (int i = 0; i < a.size(); ++i)
            s += (a.coeff_by_rank(i) * std::conj(b.coeff_by_rank(i))).real();
        return s;
    };

    CompensatedSum hsum;
    double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
    double wtot = 0.0;
    for (int i = 0; i < rule.count(); ++i) {
        RVec xi = node_vec(rule.nodes[i], 6);
        FactorizationData fac = canonical_factorization(g, xi, fd);
        AlternatingForm lchi = lie_reeb_chi(g, fac, fd);
        NodeData nd{rule.weights[i], fac.alpha, fac.beta, AlternatingForm(5, 2), AlternatingForm(5, 2), 0.0};
        for (int k = 0; k < lchi.size(); ++k) {
            nd.lalpha.coeff_by_rank(k) = lchi.coeff_by_rank(k).real();
            nd.lbeta.coeff_by_rank(k) = lchi.coeff_by_rank(k).imag();
        }
        AlternatingForm hnu = wedge(nd.beta, wedge(nd.lalpha, fac.theta));
        hnu *= mean_curvature_coefficient(3);
        nd.h = density_ratio(hnu, fac.nu).real();
        hsum.add(nd.w * nd.h);
        wtot += nd.w;
        hmin = std::min(hmin, nd.h);
        hmax = std::max(hmax, nd.h);
        num += nd.w * (dotf(nd.lalpha, nd.beta) - dotf(nd.lbeta, nd.alpha));
        den += nd.w * (dotf(nd.alpha, nd.alpha) + dotf(nd.beta, nd.beta));
        data.push_back(std::move(nd));
    }
    SasakiEinsteinReport rep;
    rep.lambda = num / den;
    double g1 = 0.0, g2 = 0.0, na = 0.0, nb = 0.0;
    for (const auto& nd : data) {
        AlternatingForm r1 = nd.lalpha - rep.lambda * nd.beta;
        AlternatingForm r2 = nd.lbeta + rep.lambda * nd.alpha;
        g1 += nd.w * dotf(r1, r1);
        g2 += nd.w * dotf(r2, r2);
        na += nd.w * dotf(nd.alpha, nd.alpha);
        nb += nd.w * dotf(nd.beta, nd.beta);
    }
    rep.gamma1_rel = std::sqrt(g1 / na);
    rep.gamma2_rel = std::sqrt(g2 / nb);
    rep.h_mean = hsum.value() / wtot;
    rep.h_spread = (hmax - hmin) / std::abs(rep.h_mean);
    rep.lambda_from_h = 8.0 * rep.h_mean / 3.0;
    return rep;
}

// seeded direction built from a few harmonic components; used by the seeded
// suites (criticality, route agreement, scale invariance)
inline RadialGraph seeded_graph(int n, std::uint64_t seed, double amplitude, int max_degree = 4) {
    Rng rng(seed);
    std::vector<std::pair<int, int>> pool;
    for (int d = 1; d <= max_degree; ++d)
        for (int p = d; p >= 0; --p) pool.push_back({p, d - p});
    RadialGraph g;
    g.n = n;
    int picks = 2 + rng.index(2);
    for (int k = 0; k < picks; ++k) {
        auto [p, q] = pool[rng.index(static_cast<int>(pool.size()))];
        auto basis = harmonic_basis(n, p, q);
        const auto& P = basis.elements[rng.index(static_cast<int>(basis.elements.size()))];
        g.terms.push_back({rng.uniform() < 0.5, amplitude * rng.uniform(-1.0, 1.0), P});
    }
    return g;
}

} // namespace pshvol
