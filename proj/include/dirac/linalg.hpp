#pragma once

// Exact linear algebra: rational matrices at sample points, and generic
// (pivot on entries that are not identically zero) elimination over Expr.

#include <optional>
#include <vector>

#include "dirac/expr.hpp"

namespace dirac::linalg {

using expr::Expr;
using expr::Scalar;

using QVector = std::vector<Scalar>;
using QMatrix = std::vector<QVector>;  // row-major

struct Echelon {
  QMatrix rows;             // reduced row echelon form, zero rows dropped
  std::vector<int> pivots;  // pivot column per row
};

Echelon rref(QMatrix m, std::size_t cols);
int rank(const QMatrix& m, std::size_t cols);
// Basis of {v : m v = 0}.
QMatrix nullspace(const QMatrix& m, std::size_t cols);
// Basis of {c : sum_i c_i m[i] = 0} (left kernel).
QMatrix left_nullspace(const QMatrix& m, std::size_t cols);
// Some x with m x = b.
std::optional<QVector> solve(const QMatrix& m, const QVector& b, std::size_t cols);
bool row_space_equal(const QMatrix& a, const QMatrix& b, std::size_t cols);
// Independent rows spanning the same space.
QMatrix row_basis(const QMatrix& m, std::size_t cols);
// Rows of a basis of the span of the given rows intersected with {v : c v = 0 for c in constraints}.
QMatrix restrict_span(const QMatrix& span, const QMatrix& constraints, std::size_t cols);

using EMatrix = std::vector<std::vector<Expr>>;

struct SymbolicEchelon {
  EMatrix rows;
  std::vector<int> pivots;
};

// Elimination over rational functions; pivots are entries whose normal form is
// not zero, so results hold wherever the chosen pivots do not vanish.
SymbolicEchelon symbolic_rref(EMatrix m, std::size_t cols);
EMatrix symbolic_nullspace(const EMatrix& m, std::size_t cols);
// Some x with m x = b, or nullopt if inconsistent.
std::optional<std::vector<Expr>> symbolic_solve(const EMatrix& m, const std::vector<Expr>& b, std::size_t cols);
// nullopt if singular as a matrix of rational functions.
std::optional<EMatrix> symbolic_inverse(const EMatrix& m);

QMatrix evaluate(const EMatrix& m, const expr::ExactPoint& p);

}  // namespace dirac::linalg
