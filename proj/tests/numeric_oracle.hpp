#pragma once

// Plain double evaluations of the defining series, independent of the exact engine.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t n) { return Mat(n, std::vector<double>(n, 0.0)); }
inline Mat eye(std::size_t n) {
    Mat m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}
inline Mat mul(const Mat& a, const Mat& b) {
    Mat c = zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a.size(); ++k)
            for (std::size_t j = 0; j < a.size(); ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}
inline Mat add(Mat a, const Mat& b, double s = 1) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) a[i][j] += s * b[i][j];
    return a;
}
inline Mat kr(const Mat& a, const Mat& b) {
    std::size_t n = a.size(), m = b.size();
    Mat c = zeros(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) c[i * m + k][j * m + l] = a[i][j] * b[k][l];
    return c;
}
inline Mat mpow(const Mat& a, int k) {
    Mat r = eye(a.size());
    for (int i = 0; i < k; ++i) r = mul(r, a);
    return r;
}

struct NumericSeries {
    double q, x;

    double qn(int n) const { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1 / q); }
    double qf(int n) const {
        double r = 1;
        for (int i = 1; i <= n; ++i) r *= qn(i);
        return r;
    }
    Mat ep(int tj) const {
        Mat m = zeros(tj + 1);
        for (int i = 1; i <= tj; ++i) {
            int w = tj - 2 * i;
            m[i - 1][i] = std::sqrt(qn((tj - w) / 2) * qn((tj + w) / 2 + 1));
        }
        return m;
    }
    Mat em(int tj) const {
        Mat m = zeros(tj + 1);
        for (int i = 0; i < tj; ++i) {
            int w = tj - 2 * i;
            m[i + 1][i] = std::sqrt(qn((tj + w) / 2) * qn((tj - w) / 2 + 1));
        }
        return m;
    }
    static int w(int tj, int i) { return tj - 2 * i; }

    // q^{c * (weight of leg 1, weight of leg 2)} as a diagonal
    Mat diag2(int t1, int t2, const std::function<double(int, int)>& f) const {
        Mat m = zeros((t1 + 1) * (t2 + 1));
        for (int a = 0; a <= t1; ++a)
            for (int b = 0; b <= t2; ++b) m[a * (t2 + 1) + b][a * (t2 + 1) + b] = f(w(t1, a), w(t2, b));
        return m;
    }

    Mat twist(int t1, int t2, bool inverse) const {
        Mat s = zeros((t1 + 1) * (t2 + 1));
        for (int k = 0; k <= std::min(t1, t2); ++k) {
            double c = std::pow(q - 1 / q, k) / qf(k) * std::pow(x, k) * (!inverse && k % 2 ? -1 : 1);
            int lo = inverse ? 1 : k, hi = inverse ? k : 2 * k - 1;
            Mat d = diag2(t1, t2, [&](int h1, int h2) {
                double r = std::pow(q, 0.5 * k * (h1 + h2));
                for (int nu = lo; nu <= hi; ++nu) r /= x * std::pow(q, nu + h2) - 1 / (x * std::pow(q, nu + h2));
                return r;
            });
            s = add(s, mul(d, kr(mpow(ep(t1), k), mpow(em(t2), k))), c);
        }
        return s;
    }
    Mat drinfeld(int t1, int t2) const {
        Mat s = zeros((t1 + 1) * (t2 + 1));
        for (int i = 0; i <= std::min(t1, t2); ++i) {
            double c = std::pow(q - 1 / q, i) * std::pow(q, -0.5 * i * (i + 1)) / qf(i);
            Mat a = eye(t1 + 1), b = eye(t2 + 1);
            for (int r = 0; r <= t1; ++r) a[r][r] = std::pow(q, 0.5 * i * w(t1, r));
            for (int r = 0; r <= t2; ++r) b[r][r] = std::pow(q, -0.5 * i * w(t2, r));
            s = add(s, kr(mul(a, mpow(ep(t1), i)), mul(b, mpow(em(t2), i))), c);
        }
        return mul(diag2(t1, t2, [&](int h1, int h2) { return std::pow(q, 0.5 * h1 * h2); }), s);
    }
    // P A P for A on (t2, t1)
    static Mat flip(const Mat& a, int t1, int t2) {
        std::size_t n = a.size();
        Mat r = zeros(n);
        auto f = [&](std::size_t i) { return (i % (t1 + 1)) * (t2 + 1) + i / (t1 + 1); };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r[f(i)][f(j)] = a[i][j];
        return r;
    }
    Mat r(int t1, int t2) const { return mul(mul(flip(twist(t2, t1, true), t1, t2), drinfeld(t1, t2)), twist(t1, t2, false)); }
};

inline double qnum_d(double q, int n) { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1 / q); }

inline double qbinom_d(double q, int n, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r *= qnum_d(q, n - i) / qnum_d(q, i + 1);
    return r;
}

inline double c_d(int j, double q, double X) {
    return (std::pow(q, j) * X - std::pow(q, -j) / X) * (std::pow(q, -j - 1) * X - std::pow(q, j + 1) / X) /
           ((X - 1 / X) * (X / q - q / X));
}

// closed-form eigenfunction in doubles
inline double psi_d(int j, int k, double q, double x) {
    double s = 0;
    for (int n = 0; n <= j; ++n) {
        double t = (n % 2 ? -1 : 1) * qbinom_d(q, j, n);
        for (int r = 1; r <= n; ++r)
            t *= (std::pow(q, r - j - 1) * x - std::pow(q, -r + j + 1) / x) / (std::pow(q, r) * x - std::pow(q, -r) / x);
        double e = k * (2 * n - j);
        t *= std::pow(q, e) * std::pow(x, k) - std::pow(q, -e) * std::pow(x, -k);
        s += t;
    }
    return s;
}

}  // namespace oracle
