#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "pshvol/alt_forms.hpp"
#include "pshvol/errors.hpp"
#include "pshvol/frames.hpp"
#include "pshvol/harmonics.hpp"
#include "pshvol/jets.hpp"
#include "pshvol/quadrature.hpp"

namespace pshvol {

using Jet = Jet2<6>; // 2n real coordinates, n <= 3; unused slots stay zero

// ---------------------------------------------------------------------------
// Radial graphs M_f = { e^{f(xi)} xi : xi in S^{2n-1} }, with f a real
// combination of re/im parts of bigraded polynomials restricted to the
// sphere and extended 0-homogeneously.
// ---------------------------------------------------------------------------
struct GraphTerm {
    bool imag_part = false; // take Im(P) instead of Re(P)
    double coeff = 0.0;
    BigradedPoly poly;
};

struct RadialGraph {
    int n = 2;
    std::vector<GraphTerm> terms;

    bool s1_invariant() const {
        for (const auto& t : terms)
            if (t.poly.p() != t.poly.q()) return false;
        return true;
    }

    double f(const RVec& x) const {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        double rinv = 1.0 / std::sqrt(r2);
        std::vector<cplx> z(n);
        for (int a = 0; a < n; ++a) z[a] = cplx(x[2 * a] * rinv, x[2 * a + 1] * rinv);
        double s = 0.0;
        for (const auto& t : terms) {
            cplx v = t.poly.eval_point(z);
            s += t.coeff * (t.imag_part ? v.imag() : v.real());
        }
        return s;
    }

    // 2-jet of the 0-homogeneous extension f(x/|x|) at an arbitrary x != 0
    Jet f_jet(const RVec& x) const {
        std::vector<Cx<Jet>> z(n);
        Jet r2(0.0);
        for (int a = 0; a < n; ++a) {
            Jet xa = Jet::variable(x[2 * a], 2 * a);
            Jet ya = Jet::variable(x[2 * a + 1], 2 * a + 1);
            z[a] = Cx<Jet>(xa, ya);
            r2 = r2 + xa * xa + ya * ya;
        }
        Jet r = sqrt(r2);
        Jet acc(0.0);
        for (const auto& t : terms) {
            Cx<Jet> v = t.poly.eval(z);
            Jet part = t.imag_part ? v.im : v.re;
            int d = t.poly.p() + t.poly.q();
            if (d > 0) part = part * inv(powi(r, d));
            acc = acc + t.coeff * part;
        }
        return acc;
    }
};

inline RadialGraph graph_sum(const RadialGraph& a, const RadialGraph& b, double tb) {
    RadialGraph r = a;
    for (auto t : b.terms) {
        t.coeff *= tb;
        r.terms.push_back(t);
    }
    return r;
}

inline RadialGraph constant_graph(int n, double c) {
    RadialGraph g;
    g.n = n;
    BigradedPoly one(n, 0, 0);
    one.add_term(std::vector<int>(n, 0), std::vector<int>(n, 0), 1.0);
    g.terms.push_back({false, c, one});
    return g;
}

inline RadialGraph shifted_graph(const RadialGraph& g, double c) {
    return graph_sum(g, constant_graph(g.n, 1.0), c);
}

// ---------------------------------------------------------------------------
// Ambient 2-jet of a defining function at a point of the hypersurface.
// ---------------------------------------------------------------------------
struct AmbientJet {
    int n = 2;
    RVec point;                           // 2n real coordinates
    double F = 0.0;                       // ~0 on the hypersurface
    RVec grad_real;                       // length 2n
    std::vector<RVec> hess_real;          // 2n x 2n, symmetric
    std::vector<cplx> grad_complex;       // dF/dz_a
    std::vector<std::vector<cplx>> hess_complex; // F_{a bbar}, Hermitian

    static AmbientJet from_jet(const Jet& Fj, const RVec& p, int n) {
        AmbientJet out;
        out.n = n;
        out.point = p;
        out.F = Fj.v;
        const int d = 2 * n;
        out.grad_real.assign(d, 0.0);
        for (int i = 0; i < d; ++i) out.grad_real[i] = Fj.g[i];
        out.hess_real.assign(d, RVec(d, 0.0));
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) out.hess_real[i][k] = 0.5 * (Fj.hess(i, k) + Fj.hess(k, i));
        out.grad_complex.assign(n, 0.0);
        for (int a = 0; a < n; ++a)
            out.grad_complex[a] = 0.5 * cplx(out.grad_real[2 * a], -out.grad_real[2 * a + 1]);
        out.hess_complex.assign(n, std::vector<cplx>(n, 0.0));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double xx = out.hess_real[2 * a][2 * b];
                double yy = out.hess_real[2 * a + 1][2 * b + 1];
                double xy = out.hess_real[2 * a][2 * b + 1];
                double yx = out.hess_real[2 * a + 1][2 * b];
                out.hess_complex[a][b] = 0.25 * cplx(xx + yy, xy - yx);
            }
        return out;
    }
};

// 2-jet of F = r - e^{f} at the graph point above xi
inline AmbientJet defining_jet(const RadialGraph& g, const RVec& xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    if (std::abs(r2 - 1.0) > 1e-12) throw NotUnit("defining_jet: xi is not a unit vector");
    double fv = g.f(xi);
    double ef = std::exp(fv);
    const int d = 2 * g.n;
    RVec p(d);
    for (int i = 0; i < d; ++i) p[i] = ef * xi[i];

    Jet rr(0.0);
    for (int i = 0; i < d; ++i) {
        Jet c = Jet::variable(p[i], i);
        rr = rr + c * c;
    }
    Jet Fj = sqrt(rr) - exp(g.f_jet(p));
    return AmbientJet::from_jet(Fj, p, g.n);
}

// ---------------------------------------------------------------------------
// Levi data
// ---------------------------------------------------------------------------

// i dF_z ^ dF_zbar ^ (i ddbar F)^{n-1} = 2^n (n-1)! g mu
inline double levi_density_g(const AmbientJet& jet) {
    const int n = jet.n;
    AlternatingForm dF(2 * n, 1);
    for (int a = 0; a < n; ++a) dF += jet.grad_complex[a] * dz_form(n, a);
    AlternatingForm dFbar = conj(dF);

    AlternatingForm hess(2 * n, 2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            hess += jet.hess_complex[a][b] * wedge(dz_form(n, a), dzbar_form(n, b));
    hess *= cplx(0.0, 1.0);

    AlternatingForm w = wedge(wedge(cplx(0.0, 1.0) * dF, dFbar), wedge_power(hess, n - 1));
    double fact = 1.0;
    for (int i = 2; i <= n - 1; ++i) fact *= i;
    cplx ratio = density_ratio(w, std::pow(2.0, n) * fact * standard_volume(n));
    return ratio.real();
}

// orthonormal complex basis of H^{1,0} = ker(sum_a h_a dF/dz_a)
inline std::vector<std::vector<cplx>> complex_tangent_basis(const AmbientJet& jet) {
    const int n = jet.n;
    // hermitian-unit normal direction: nu with <h, nu> = sum h_a conj(nu_a) = condition
    std::vector<cplx> nu(n);
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
        nu[a] = std::conj(jet.grad_complex[a]);
        s += std::norm(nu[a]);
    }
    s = std::sqrt(s);
    for (auto& v : nu) v /= s;

    int drop = 0;
    for (int a = 1; a < n; ++a)
        if (std::abs(nu[a]) > std::abs(nu[drop])) drop = a;

    std::vector<std::vector<cplx>> basis;
    for (int a = 0; a < n; ++a) {
        if (a == drop) continue;
        std::vector<cplx> h(n, 0.0);
        h[a] = 1.0;
        cplx pr = 0.0;
        for (int k = 0; k < n; ++k) pr += h[k] * std::conj(nu[k]);
        for (int k = 0; k < n; ++k) h[k] -= pr * nu[k];
        for (const auto& w : basis) {
            cplx q = 0.0;
            for (int k = 0; k < n; ++k) q += h[k] * std::conj(w[k]);
            for (int k = 0; k < n; ++k) h[k] -= q * w[k];
        }
        double nh = 0.0;
        for (int k = 0; k < n; ++k) nh += std::norm(h[k]);
        nh = std::sqrt(nh);
        for (int k = 0; k < n; ++k) h[k] /= nh;
        basis.push_back(h);
    }
    return basis;
}

// least eigenvalue of the Levi form restricted to H (n-1 <= 2)
inline double levi_min_eigenvalue(const AmbientJet& jet) {
    auto basis = complex_tangent_basis(jet);
    const int m = static_cast<int>(basis.size());
    std::vector<std::vector<cplx>> L(m, std::vector<cplx>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            cplx s = 0.0;
            for (int a = 0; a < jet.n; ++a)
                for (int b = 0; b < jet.n; ++b)
                    s += jet.hess_complex[a][b] * basis[i][a] * std::conj(basis[j][b]);
            L[i][j] = s;
        }
    if (m == 1) return L[0][0].real();
    double tr = L[0][0].real() + L[1][1].real();
    double det = (L[0][0] * L[1][1] - L[0][1] * L[1][0]).real();
    double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    return 0.5 * tr - disc;
}

// ---------------------------------------------------------------------------
// The volume density nu against the round volume, by two independent routes.
// Both take a generic defining-function jet, a transversal w with
// grad_w F > 0, and an ordered tangent frame (the density is reported against
// that frame).
// ---------------------------------------------------------------------------
inline double mu_on_frame(const RVec& w, const std::vector<RVec>& t) {
    std::vector<RVec> cols;
    cols.push_back(w);
    for (const auto& v : t) cols.push_back(v);
    return det_columns(cols);
}

inline double grad_along(const AmbientJet& jet, const RVec& w) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) s += jet.grad_real[i] * w[i];
    return s;
}

// nu = 2 g^{1/(n+1)} (grad_w F)^{-1} i_w mu
inline double nu_levi_from_jet(const AmbientJet& jet, const RVec& w, const std::vector<RVec>& t) {
    double g = levi_density_g(jet);
    if (g <= 0.0) throw NotPseudoconvex("nu_levi_from_jet: nonpositive Levi density");
    double gw = grad_along(jet, w);
    return 2.0 * std::pow(g, 1.0 / (jet.n + 1)) * mu_on_frame(w, t) / gw;
}

// nu = nu2^{1/(n+1)} nu1^{n/(n+1)} with
//   nu1 = (grad_w F)^{-1} i_w mu  and
//   nu2 = (2^{n-1} (n-1)!)^{-1} gamma ^ (d gamma)^{n-1},  gamma = I dF,
// the latter evaluated analytically from the ambient 2-jet. The (-1)^n
// orientation factor makes nu2 positive on pseudoconvex data.
inline double nu_polar_from_jet(const AmbientJet& jet, const RVec& w, const std::vector<RVec>& t) {
    const int n = jet.n;
    const int d = 2 * n;
    const int m = d - 1;

    // gamma components: gamma(dx_a) = F_{y_a}, gamma(dy_a) = -F_{x_a}
    RVec gam(d);
    for (int a = 0; a < n; ++a) {
        gam[2 * a] = jet.grad_real[2 * a + 1];
        gam[2 * a + 1] = -jet.grad_real[2 * a];
    }
    // D_{kl} = d_k gamma_l - d_l gamma_k from the real Hessian
    std::vector<RVec> D(d, RVec(d, 0.0));
    auto dg = [&](int k, int l) { // d_k gamma_l
        int a = l / 2;
        return (l % 2 == 0) ? jet.hess_real[k][2 * a + 1] : -jet.hess_real[k][2 * a];
    };
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) D[k][l] = dg(k, l) - dg(l, k);

    AlternatingForm gr(m, 1), dgr(m, 2);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += gam[k] * t[i][k];
        gr.set_coeff(1u << i, s);
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                double row = 0.0;
                for (int l = 0; l < d; ++l) row += D[k][l] * t[j][l];
                s += t[i][k] * row;
            }
            dgr.set_coeff((1u << i) | (1u << j), s);
        }

    AlternatingForm top = wedge(gr, wedge_power(dgr, n - 1));
    double fact = 1.0;
    for (int i = 2; i <= n - 1; ++i) fact *= i;
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    double nu2 = sign * top.coeff_by_rank(0).real() / (std::pow(2.0, n - 1) * fact);

    double nu1 = mu_on_frame(w, t) / grad_along(jet, w);
    if (nu2 <= 0.0 || nu1 <= 0.0)
        throw NotPseudoconvex("nu_polar_from_jet: nonpositive volume density");
    return std::pow(nu2, 1.0 / (n + 1)) * std::pow(nu1, double(n) / (n + 1));
}

// ---------------------------------------------------------------------------
// Pointwise surface data for a radial graph above xi.
// ---------------------------------------------------------------------------
struct SurfacePoint {
    RVec xi;               // unit base point on S^{2n-1}
    double f = 0.0;        // f(xi)
    RVec p;                // e^f xi
    TangentFrame fr;       // oriented ONB of T_xi S
    std::vector<RVec> t;   // pushed tangent frame of M at p
    AmbientJet jet;        // 2-jet of F = r - e^f at p
};

inline SurfacePoint surface_point(const RadialGraph& g, const RVec& xi) {
    SurfacePoint sp;
    sp.xi = xi;
    sp.fr = tangent_frame(xi);
    sp.jet = defining_jet(g, xi);
    sp.p = sp.jet.point;
    sp.f = g.f(xi);
    double ef = std::exp(sp.f);
    const int d = 2 * g.n;
    // tangency: dF(u + df(u) xi) = 0 with dF(xi-direction) = 1 gives
    // df(u) = -dF(u) at the surface point
    sp.t.reserve(d - 1);
    for (const auto& u : sp.fr.u) {
        double dfu = 0.0;
        for (int k = 0; k < d; ++k) dfu -= sp.jet.grad_real[k] * u[k];
        RVec tv(d);
        for (int k = 0; k < d; ++k) tv[k] = ef * (u[k] + dfu * xi[k]);
        sp.t.push_back(tv);
    }
    return sp;
}

enum class NuRoute { levi, polar };

inline double nu_density(const RadialGraph& g, const RVec& xi, NuRoute route) {
    SurfacePoint sp = surface_point(g, xi);
    if (route == NuRoute::levi) return nu_levi_from_jet(sp.jet, sp.xi, sp.t);
    return nu_polar_from_jet(sp.jet, sp.xi, sp.t);
}

struct NuDiagnostic {
    double levi = 0.0, polar = 0.0;
    double rel_gap = 0.0;
};

inline NuDiagnostic nu_route_diagnostic(const RadialGraph& g, const RVec& xi, bool throw_on_gap = false,
                                        double tol = 1e-6) {
    SurfacePoint sp = surface_point(g, xi);
    NuDiagnostic d;
    d.levi = nu_levi_from_jet(sp.jet, sp.xi, sp.t);
    d.polar = nu_polar_from_jet(sp.jet, sp.xi, sp.t);
    d.rel_gap = std::abs(d.levi - d.polar) / std::abs(d.levi);
    if (throw_on_gap && d.rel_gap > tol)
        throw RouteMismatch("nu routes disagree by " + std::to_string(d.rel_gap));
    return d;
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------
struct PseudoconvexityReport {
    double min_eigenvalue = 0.0;
    int worst_node = -1;
    bool certified = false;
};

inline PseudoconvexityReport pseudoconvexity_check(const RadialGraph& g, const SphereRule& rule) {
    PseudoconvexityReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rule.count(); ++i) {
        AmbientJet jet = defining_jet(g, node_vec(rule.nodes[i], 2 * g.n));
        double e = levi_min_eigenvalue(jet);
        if (e < rep.min_eigenvalue) {
            rep.min_eigenvalue = e;
            rep.worst_node = i;
        }
    }
    rep.certified = rep.min_eigenvalue > 0.0;
    return rep;
}

inline double functional_A(const RadialGraph& g, const SphereRule& rule, NuRoute route = NuRoute::levi) {
    return integrate(
        [&](const Node& x, int i) {
            (void)i;
            return nu_density(g, node_vec(x, 2 * g.n), route);
        },
        rule);
}

inline double functional_V(const RadialGraph& g, const SphereRule& rule) {
    const double two_n = 2.0 * g.n;
    double I = integrate(
        [&](const Node& x, int i) {
            (void)i;
            return std::exp(two_n * g.f(node_vec(x, 2 * g.n)));
        },
        rule);
    return I / two_n;
}

inline double functional_R(const RadialGraph& g, const SphereRule& rule, NuRoute route = NuRoute::levi) {
    double A = functional_A(g, rule, route);
    double V = functional_V(g, rule);
    return A * std::pow(V, -double(g.n) / (g.n + 1));
}

inline double sphere_R(int n) {
    double A = sphere_volume(n);
    double V = A / (2.0 * n);
    return A * std::pow(V, -double(n) / (n + 1));
}

struct FunctionalReport {
    double A = 0.0, V = 0.0, R = 0.0;
    double min_levi_eig = 0.0;
    int worst_node = -1;
    double route_gap = 0.0;
    std::string rule_id;
    std::uint64_t seed = 0;
};

inline FunctionalReport functional_report(const RadialGraph& g, const SphereRule& rule,
                                          int route_gap_samples = 0) {
    FunctionalReport rep;
    rep.rule_id = rule.id;
    rep.seed = rule.seed;
    rep.min_levi_eig = std::numeric_limits<double>::infinity();

    CompensatedSum accA, accV;
    const int gap_every =
        route_gap_samples > 0 ? std::max(1, rule.count() / route_gap_samples) : 1;
    for (int i = 0; i < rule.count(); ++i) {
        RVec xi = node_vec(rule.nodes[i], 2 * g.n);
        SurfacePoint sp = surface_point(g, xi);
        double e = levi_min_eigenvalue(sp.jet);
        if (e < rep.min_levi_eig) {
            rep.min_levi_eig = e;
            rep.worst_node = i;
        }
        if (e <= 0.0)
            throw NotPseudoconvex("functional_report: Levi form not positive at node " + std::to_string(i));
        double ld = nu_levi_from_jet(sp.jet, sp.xi, sp.t);
        accA.add(rule.weights[i] * ld);
        accV.add(rule.weights[i] * std::exp(2.0 * g.n * sp.f));
        if (i % gap_every == 0) {
            double pd = nu_polar_from_jet(sp.jet, sp.xi, sp.t);
            rep.route_gap = std::max(rep.route_gap, std::abs(ld - pd) / std::abs(ld));
        }
    }
    rep.A = accA.value();
    rep.V = accV.value() / (2.0 * g.n);
    rep.R = rep.A * std::pow(rep.V, -double(g.n) / (g.n + 1));
    return rep;
}

} // namespace pshvol
