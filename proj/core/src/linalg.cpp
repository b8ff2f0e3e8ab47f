// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ficut {

Matrix identity(size_t n) {
    Matrix m(n, Vector(n, 0.0));
    for (size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

Matrix transpose(const Matrix& a) {
    size_t r = a.size(), c = a.empty() ? 0 : a[0].size();
    Matrix t(c, Vector(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) t[j][i] = a[i][j];
    return t;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    size_t r = a.size(), k = b.size(), c = b.empty() ? 0 : b[0].size();
    Matrix m(r, Vector(c, 0.0));
    for (size_t i = 0; i < r; ++i)
        for (size_t t = 0; t < k; ++t)
            for (size_t j = 0; j < c; ++j) m[i][j] += a[i][t] * b[t][j];
    return m;
}

Vector mat_vec(const Matrix& a, const Vector& x) {
    Vector y(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

Matrix mat_scale(const Matrix& a, double k) {
    Matrix m = a;
    for (auto& row : m)
        for (double& v : row) v *= k;
    return m;
}

Matrix mat_add(const Matrix& a, const Matrix& b) {
    Matrix m = a;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[i].size(); ++j) m[i][j] += b[i][j];
    return m;
}

Matrix mat_sub(const Matrix& a, const Matrix& b) {
    Matrix m = a;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[i].size(); ++j) m[i][j] -= b[i][j];
    return m;
}

double max_norm(const Matrix& a) {
    double n = 0.0;
    for (const auto& row : a)
        for (double v : row) n = std::max(n, std::fabs(v));
    return n;
}

std::optional<Vector> solve_linear(Matrix a, Vector b) {
    size_t n = a.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-12) return std::nullopt;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    Vector x(n, 0.0);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

std::optional<Matrix> invert(const Matrix& a) {
    size_t n = a.size();
    Matrix inv(n, Vector(n));
    for (size_t col = 0; col < n; ++col) {
        Vector e(n, 0.0);
        e[col] = 1.0;
        auto x = solve_linear(a, e);
        if (!x) return std::nullopt;
        for (size_t r = 0; r < n; ++r) inv[r][col] = (*x)[r];
    }
    return inv;
}

double determinant(Matrix a) {
    size_t n = a.size();
    double det = 1.0;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[col], a[piv]);
            det = -det;
        }
        det *= a[col][col];
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

std::optional<Matrix> cholesky(const Matrix& a) {
    size_t n = a.size();
    Matrix l(n, Vector(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0) return std::nullopt;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

Vector symmetric_eigenvalues(Matrix a) {
    size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    Vector ev(n);
    for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

bool is_psd(const Matrix& a, double tol) {
    if (a.empty()) return true;
    Vector ev = symmetric_eigenvalues(a);
    double scale = std::max(1.0, std::fabs(ev.back()));
    return ev.front() >= -tol * scale;
}

} // namespace ficut
