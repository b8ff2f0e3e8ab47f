// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

namespace ficut {

/// Dense row-major matrix; sizes here are tiny (n <= 5), so clarity beats
/// cleverness throughout.
using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

Matrix identity(size_t n);
Matrix transpose(const Matrix& a);
Matrix mat_mul(const Matrix& a, const Matrix& b);
Vector mat_vec(const Matrix& a, const Vector& x);
Matrix mat_scale(const Matrix& a, double k);
Matrix mat_add(const Matrix& a, const Matrix& b);
Matrix mat_sub(const Matrix& a, const Matrix& b);
double max_norm(const Matrix& a);

/// Gaussian elimination with partial pivoting; nullopt on (near-)singular.
std::optional<Vector> solve_linear(Matrix a, Vector b);
std::optional<Matrix> invert(const Matrix& a);
double determinant(Matrix a);

/// Lower-triangular L with L Lᵀ = a; nullopt when a is not positive
/// definite. Requires a symmetric input.
std::optional<Matrix> cholesky(const Matrix& a);

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
Vector symmetric_eigenvalues(Matrix a);

/// Positive semidefiniteness with a small relative tolerance on the least
/// eigenvalue (boundary cases like a rank-deficient difference count as
/// semidefinite).
bool is_psd(const Matrix& a, double tol = 1e-9);

} // namespace ficut
