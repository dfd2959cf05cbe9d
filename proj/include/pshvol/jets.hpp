#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace pshvol {

// Second-order forward-mode scalar: value, gradient and full Hessian with
// respect to N independent variables. All elementary operations propagate
// exact derivatives, so pipelines built from these give analytic 2-jets.
template <int N>
struct Jet2 {
    double v = 0.0;
    std::array<double, N> g{};
    std::array<double, N * N> h{};

    Jet2() = default;
    Jet2(double value) : v(value) {}

    static Jet2 variable(double value, int i) {
        Jet2 j(value);
        j.g[i] = 1.0;
        return j;
    }

    double hess(int i, int k) const { return h[i * N + k]; }
    double& hess(int i, int k) { return h[i * N + k]; }
};

template <int N>
Jet2<N> operator+(const Jet2<N>& a, const Jet2<N>& b) {
    Jet2<N> r(a.v + b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] + b.g[i];
    for (int i = 0; i < N * N; ++i) r.h[i] = a.h[i] + b.h[i];
    return r;
}

template <int N>
Jet2<N> operator-(const Jet2<N>& a, const Jet2<N>& b) {
    Jet2<N> r(a.v - b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] - b.g[i];
    for (int i = 0; i < N * N; ++i) r.h[i] = a.h[i] - b.h[i];
    return r;
}

template <int N>
Jet2<N> operator-(const Jet2<N>& a) {
    Jet2<N> r(-a.v);
    for (int i = 0; i < N; ++i) r.g[i] = -a.g[i];
    for (int i = 0; i < N * N; ++i) r.h[i] = -a.h[i];
    return r;
}

template <int N>
Jet2<N> operator*(const Jet2<N>& a, const Jet2<N>& b) {
    Jet2<N> r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            r.hess(i, k) = a.hess(i, k) * b.v + a.g[i] * b.g[k] + a.g[k] * b.g[i] + a.v * b.hess(i, k);
    return r;
}

template <int N> Jet2<N> operator+(const Jet2<N>& a, double s) { Jet2<N> r = a; r.v += s; return r; }
template <int N> Jet2<N> operator+(double s, const Jet2<N>& a) { return a + s; }
template <int N> Jet2<N> operator-(const Jet2<N>& a, double s) { Jet2<N> r = a; r.v -= s; return r; }
template <int N> Jet2<N> operator-(double s, const Jet2<N>& a) { return (-a) + s; }

template <int N>
Jet2<N> operator*(const Jet2<N>& a, double s) {
    Jet2<N> r(a.v * s);
    for (int i = 0; i < N; ++i) r.g[i] = a.g[i] * s;
    for (int i = 0; i < N * N; ++i) r.h[i] = a.h[i] * s;
    return r;
}
template <int N> Jet2<N> operator*(double s, const Jet2<N>& a) { return a * s; }
template <int N> Jet2<N> operator/(const Jet2<N>& a, double s) { return a * (1.0 / s); }

// f(a) with supplied first and second derivative of f at a.v
template <int N>
Jet2<N> chain(const Jet2<N>& a, double f, double fp, double fpp) {
    Jet2<N> r(f);
    for (int i = 0; i < N; ++i) r.g[i] = fp * a.g[i];
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k)
            r.hess(i, k) = fp * a.hess(i, k) + fpp * a.g[i] * a.g[k];
    return r;
}

template <int N> Jet2<N> exp(const Jet2<N>& a) {
    double e = std::exp(a.v);
    return chain(a, e, e, e);
}
template <int N> Jet2<N> log(const Jet2<N>& a) {
    return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
template <int N> Jet2<N> sqrt(const Jet2<N>& a) {
    double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
template <int N> Jet2<N> pow(const Jet2<N>& a, double e) {
    double p = std::pow(a.v, e);
    return chain(a, p, e * p / a.v, e * (e - 1.0) * p / (a.v * a.v));
}
template <int N> Jet2<N> inv(const Jet2<N>& a) {
    double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}
template <int N> Jet2<N> operator/(const Jet2<N>& a, const Jet2<N>& b) { return a * inv(b); }

template <int N>
Jet2<N> powi(const Jet2<N>& a, int e) {
    Jet2<N> r(1.0);
    Jet2<N> base = a;
    int k = e;
    while (k > 0) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

// Minimal complex-over-T scalar; used with T = double or T = Jet2<N>.
template <typename T>
struct Cx {
    T re{}, im{};
    Cx() = default;
    Cx(const T& r) : re(r) {}
    Cx(const T& r, const T& i) : re(r), im(i) {}
};

template <typename T> Cx<T> operator+(const Cx<T>& a, const Cx<T>& b) { return {a.re + b.re, a.im + b.im}; }
template <typename T> Cx<T> operator-(const Cx<T>& a, const Cx<T>& b) { return {a.re - b.re, a.im - b.im}; }
template <typename T> Cx<T> operator*(const Cx<T>& a, const Cx<T>& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <typename T> Cx<T> conj(const Cx<T>& a) { return {a.re, -a.im}; }
template <typename T> Cx<T> scale(const Cx<T>& a, double s) { return {a.re * s, a.im * s}; }
template <typename T> Cx<T> cmul(const Cx<T>& a, double re, double im) {
    return a * Cx<T>(T(re), T(im));
}

template <typename T>
Cx<T> cpowi(const Cx<T>& a, int e) {
    Cx<T> r(T(1.0), T(0.0));
    Cx<T> base = a;
    int k = e;
    while (k > 0) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

} // namespace pshvol
