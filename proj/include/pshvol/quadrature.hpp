#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pshvol/errors.hpp"
#include "pshvol/harmonics.hpp"
#include "pshvol/rng.hpp"

namespace pshvol {

// Compensated (Neumaier) accumulator; summation happens in stored node order
// so results are reproducible run to run.
struct CompensatedSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

using Node = std::array<double, 6>; // real coordinates, first 2n entries used

inline std::vector<cplx> node_to_complex(const Node& x, int n) {
    std::vector<cplx> z(n);
    for (int a = 0; a < n; ++a) z[a] = cplx(x[2 * a], x[2 * a + 1]);
    return z;
}

struct SphereRule {
    int n = 2;
    std::vector<Node> nodes;
    std::vector<double> weights;
    std::string kind;   // "product-S3" or "qmc"
    std::uint64_t seed = 0;
    std::string id;

    int count() const { return static_cast<int>(nodes.size()); }
};

struct BallRule {
    int n = 2;
    std::vector<Node> nodes;
    std::vector<double> weights;
    std::uint64_t seed = 0;
    std::string id;

    int count() const { return static_cast<int>(nodes.size()); }
};

// ---------------------------------------------------------------------------
// Gauss-Legendre on [0,1]
// ---------------------------------------------------------------------------
inline void gauss_legendre_01(int g, std::vector<double>& x, std::vector<double>& w) {
    x.assign(g, 0.0);
    w.assign(g, 0.0);
    for (int i = 0; i < g; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (g + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= g; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = g * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= g; ++k) {
            double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = g * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t); // map [-1,1] -> [0,1], keep ascending order in x
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

// ---------------------------------------------------------------------------
// Tensor Gauss/Fourier rule on S^3 in Hopf-style angles
//   z1 = cos(eta) e^{i t1},  z2 = sin(eta) e^{i t2},
//   dV = cos(eta) sin(eta) d(eta) dt1 dt2;  with u = sin^2(eta) the radial
//   integral becomes (1/2) int_0^1 du, handled by Gauss-Legendre. Monomials
//   z^a zbar^b with |a|+|b| <= 2*level + 1 integrate exactly.
// ---------------------------------------------------------------------------
inline SphereRule product_rule_s3(int level) {
    if (level < 1) throw DimensionMismatch("product_rule_s3: level must be >= 1");
    const int K = 2 * level + 2;   // azimuthal points per circle
    const int G = level + 1;       // radial Gauss points
    std::vector<double> gu, gw;
    gauss_legendre_01(G, gu, gw);

    SphereRule rule;
    rule.n = 2;
    rule.kind = "product-S3";
    rule.seed = 0;
    rule.id = "s3-product-L" + std::to_string(level);
    rule.nodes.reserve(static_cast<size_t>(G) * K * K);
    rule.weights.reserve(static_cast<size_t>(G) * K * K);

    const double dphi = 2.0 * std::numbers::pi / K;
    for (int j = 0; j < G; ++j) {
        double u = gu[j];
        double ce = std::sqrt(1.0 - u);
        double se = std::sqrt(u);
        double wj = 0.5 * gw[j] * dphi * dphi;
        for (int k1 = 0; k1 < K; ++k1) {
            double t1 = dphi * k1;
            double c1 = std::cos(t1), s1 = std::sin(t1);
            for (int k2 = 0; k2 < K; ++k2) {
                double t2 = dphi * k2;
                Node x{};
                x[0] = ce * c1;
                x[1] = ce * s1;
                x[2] = se * std::cos(t2);
                x[3] = se * std::sin(t2);
                rule.nodes.push_back(x);
                rule.weights.push_back(wj);
            }
        }
    }
    return rule;
}

// ---------------------------------------------------------------------------
// Seeded low-discrepancy rules: Halton sequence with a Cranley-Patterson
// shift, pushed to the sphere by the Gaussian-normalization map (equal
// weights Vol / count), and to the ball with the radial Jacobian.
// ---------------------------------------------------------------------------
namespace detail_qmc {

inline double halton(int base, std::uint64_t idx) {
    double r = 0.0, m = 1.0 / base;
    std::uint64_t k = idx + 1;
    while (k > 0) {
        r += m * static_cast<double>(k % base);
        k /= base;
        m /= base;
    }
    return r;
}

constexpr int primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

// Inverse normal CDF (Acklam); ~1e-9 relative accuracy, ample for sampling.
inline double inverse_normal_cdf(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double clamp01(double x) {
    const double eps = 1e-12;
    return std::min(std::max(x, eps), 1.0 - eps);
}

} // namespace detail_qmc

inline SphereRule qmc_rule(int n, int count, std::uint64_t seed) {
    if (count < 1) throw DimensionMismatch("qmc_rule: count must be >= 1");
    Rng rng(seed);
    const int d = 2 * n;
    std::array<double, 8> shift{};
    for (int i = 0; i < d; ++i) shift[i] = rng.uniform();

    SphereRule rule;
    rule.n = n;
    rule.kind = "qmc";
    rule.seed = seed;
    rule.id = "qmc-n" + std::to_string(n) + "-c" + std::to_string(count) + "-s" + std::to_string(seed);
    rule.nodes.reserve(count);
    rule.weights.assign(count, sphere_volume(n) / count);

    for (int k = 0; k < count; ++k) {
        Node x{};
        double norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            double u = detail_qmc::halton(detail_qmc::primes[i], static_cast<std::uint64_t>(k)) + shift[i];
            u -= std::floor(u);
            double g = detail_qmc::inverse_normal_cdf(detail_qmc::clamp01(u));
            x[i] = g;
            norm2 += g * g;
        }
        double inv = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < d; ++i) x[i] *= inv;
        rule.nodes.push_back(x);
    }
    return rule;
}

inline BallRule ball_rule(int n, int count, std::uint64_t seed) {
    if (count < 1) throw DimensionMismatch("ball_rule: count must be >= 1");
    Rng rng(seed);
    const int d = 2 * n;
    std::array<double, 8> shift{};
    for (int i = 0; i < d + 1; ++i) shift[i] = rng.uniform();

    BallRule rule;
    rule.n = n;
    rule.seed = seed;
    rule.id = "ball-n" + std::to_string(n) + "-c" + std::to_string(count) + "-s" + std::to_string(seed);
    rule.nodes.reserve(count);
    rule.weights.assign(count, ball_volume(n) / count);

    for (int k = 0; k < count; ++k) {
        Node x{};
        double norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            double u = detail_qmc::halton(detail_qmc::primes[i], static_cast<std::uint64_t>(k)) + shift[i];
            u -= std::floor(u);
            double g = detail_qmc::inverse_normal_cdf(detail_qmc::clamp01(u));
            x[i] = g;
            norm2 += g * g;
        }
        double ur = detail_qmc::halton(detail_qmc::primes[d], static_cast<std::uint64_t>(k)) + shift[d];
        ur -= std::floor(ur);
        double radius = std::pow(detail_qmc::clamp01(ur), 1.0 / d);
        double inv = radius / std::sqrt(norm2);
        for (int i = 0; i < d; ++i) x[i] *= inv;
        rule.nodes.push_back(x);
    }
    return rule;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------
template <typename RuleT, typename F>
double integrate(const F& f, const RuleT& rule) {
    CompensatedSum acc;
    for (int i = 0; i < rule.count(); ++i) {
        double v = f(rule.nodes[i], i);
        if (!std::isfinite(v))
            throw NonFiniteSample("integrate: non-finite sample at node " + std::to_string(i));
        acc.add(rule.weights[i] * v);
    }
    return acc.value();
}

struct IntegralStats {
    double value = 0.0;
    double se = 0.0; // sample-variance standard error estimate
};

template <typename RuleT, typename F>
IntegralStats integrate_stats(const F& f, const RuleT& rule) {
    const int m = rule.count();
    std::vector<double> vals(m);
    double wsum = 0.0;
    CompensatedSum acc;
    for (int i = 0; i < m; ++i) {
        double v = f(rule.nodes[i], i);
        if (!std::isfinite(v))
            throw NonFiniteSample("integrate_stats: non-finite sample at node " + std::to_string(i));
        vals[i] = v;
        acc.add(rule.weights[i] * v);
        wsum += rule.weights[i];
    }
    double total = acc.value();
    double mean = total / wsum;
    CompensatedSum var;
    for (int i = 0; i < m; ++i) {
        double dev = vals[i] - mean;
        var.add(rule.weights[i] * rule.weights[i] * dev * dev);
    }
    return {total, std::sqrt(var.value())};
}

// ---------------------------------------------------------------------------
// Versioned text serialization: one node per line, weight then coordinates,
// 17 significant digits.
// ---------------------------------------------------------------------------
template <typename RuleT>
void save_rule(const RuleT& rule, const std::string& path, const std::string& kind) {
    std::ofstream out(path);
    if (!out) throw IoError("save_rule: cannot open " + path);
    out << "pshvol-rule v1 kind=" << kind << " n=" << rule.n << " seed=" << rule.seed
        << " count=" << rule.count() << " id=" << rule.id << "\n";
    char buf[512];
    for (int i = 0; i < rule.count(); ++i) {
        int len = std::snprintf(buf, sizeof buf, "%.17g", rule.weights[i]);
        out.write(buf, len);
        for (int j = 0; j < 2 * rule.n; ++j) {
            len = std::snprintf(buf, sizeof buf, " %.17g", rule.nodes[i][j]);
            out.write(buf, len);
        }
        out << "\n";
    }
}

inline SphereRule load_sphere_rule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_sphere_rule: cannot open " + path);
    std::string header;
    std::getline(in, header);
    SphereRule rule;
    auto field = [&](const std::string& key) -> std::string {
        auto pos = header.find(key + "=");
        if (pos == std::string::npos) throw IoError("load_sphere_rule: malformed header");
        auto end = header.find(' ', pos);
        return header.substr(pos + key.size() + 1, end - pos - key.size() - 1);
    };
    if (header.rfind("pshvol-rule v1", 0) != 0) throw IoError("load_sphere_rule: unknown format");
    rule.n = std::stoi(field("n"));
    rule.seed = std::stoull(field("seed"));
    rule.kind = field("kind");
    rule.id = field("id");
    int count = std::stoi(field("count"));
    rule.nodes.reserve(count);
    rule.weights.reserve(count);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double w;
        ss >> w;
        Node x{};
        for (int j = 0; j < 2 * rule.n; ++j) ss >> x[j];
        rule.weights.push_back(w);
        rule.nodes.push_back(x);
    }
    if (rule.count() != count) throw IoError("load_sphere_rule: node count mismatch");
    return rule;
}

} // namespace pshvol
