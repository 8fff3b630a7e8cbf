#include "dirac/linalg.hpp"

#include <algorithm>

namespace dirac::linalg {

Echelon rref(QMatrix m, std::size_t cols) {
  Echelon out;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    const Scalar inv = 1 / m[row][c];
    for (std::size_t k = c; k < cols; ++k) m[row][k] *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][c] == 0) continue;
      const Scalar f = m[r][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[row][k];
    }
    out.pivots.push_back(static_cast<int>(c));
    ++row;
  }
  m.resize(row);
  out.rows = std::move(m);
  return out;
}

int rank(const QMatrix& m, std::size_t cols) { return static_cast<int>(rref(m, cols).pivots.size()); }

QMatrix nullspace(const QMatrix& m, std::size_t cols) {
  Echelon e = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (int p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  QMatrix out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    QVector v(cols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < e.rows.size(); ++r) v[static_cast<std::size_t>(e.pivots[r])] = -e.rows[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

QMatrix left_nullspace(const QMatrix& m, std::size_t cols) {
  QMatrix t(cols, QVector(m.size(), 0));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) t[c][r] = m[r][c];
  return nullspace(t, m.size());
}

std::optional<QVector> solve(const QMatrix& m, const QVector& b, std::size_t cols) {
  QMatrix aug = m;
  for (std::size_t r = 0; r < aug.size(); ++r) aug[r].push_back(b[r]);
  Echelon e = rref(aug, cols + 1);
  QVector x(cols, 0);
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    if (static_cast<std::size_t>(e.pivots[r]) == cols) return std::nullopt;
    x[static_cast<std::size_t>(e.pivots[r])] = e.rows[r][cols];
  }
  return x;
}

bool row_space_equal(const QMatrix& a, const QMatrix& b, std::size_t cols) {
  QMatrix both = a;
  both.insert(both.end(), b.begin(), b.end());
  const int r = rank(both, cols);
  return rank(a, cols) == r && rank(b, cols) == r;
}

QMatrix row_basis(const QMatrix& m, std::size_t cols) { return rref(m, cols).rows; }

QMatrix restrict_span(const QMatrix& span, const QMatrix& constraints, std::size_t cols) {
  // coefficients c with constraint(sum c_i span_i) = 0
  QMatrix system(constraints.size(), QVector(span.size(), 0));
  for (std::size_t k = 0; k < constraints.size(); ++k)
    for (std::size_t i = 0; i < span.size(); ++i) {
      Scalar s = 0;
      for (std::size_t c = 0; c < cols; ++c) s += constraints[k][c] * span[i][c];
      system[k][i] = s;
    }
  QMatrix out;
  for (const auto& coeffs : nullspace(system, span.size())) {
    QVector v(cols, 0);
    for (std::size_t i = 0; i < span.size(); ++i)
      if (coeffs[i] != 0)
        for (std::size_t c = 0; c < cols; ++c) v[c] += coeffs[i] * span[i][c];
    out.push_back(std::move(v));
  }
  return row_basis(out, cols);
}

// ---------------------------------------------------------------- symbolic

namespace {

// Constants first, then the entry with the fewest terms.
std::size_t pivot_cost(const Expr& e) {
  if (e.is_constant()) return 0;
  const auto& r = e.normal();
  return r.numerator().terms().size() + r.denominator().terms().size();
}

}  // namespace

SymbolicEchelon symbolic_rref(EMatrix m, std::size_t cols) {
  SymbolicEchelon out;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t piv = m.size();
    std::size_t best = 0;
    for (std::size_t r = row; r < m.size(); ++r) {
      if (m[r][c].is_zero()) continue;
      const std::size_t cost = pivot_cost(m[r][c]);
      if (piv == m.size() || cost < best) {
        piv = r;
        best = cost;
      }
    }
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    const Expr inv = Expr(1) / m[row][c];
    for (std::size_t k = c; k < cols; ++k) m[row][k] = m[row][k] * inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][c].is_zero()) continue;
      const Expr f = m[r][c];
      for (std::size_t k = c; k < cols; ++k)
        if (!m[row][k].is_zero()) m[r][k] = m[r][k] - f * m[row][k];
    }
    out.pivots.push_back(static_cast<int>(c));
    ++row;
  }
  m.resize(row);
  out.rows = std::move(m);
  return out;
}

EMatrix symbolic_nullspace(const EMatrix& m, std::size_t cols) {
  SymbolicEchelon e = symbolic_rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (int p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  EMatrix out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Expr> v(cols, Expr(0));
    v[f] = Expr(1);
    for (std::size_t r = 0; r < e.rows.size(); ++r) v[static_cast<std::size_t>(e.pivots[r])] = -e.rows[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<Expr>> symbolic_solve(const EMatrix& m, const std::vector<Expr>& b, std::size_t cols) {
  EMatrix aug = m;
  for (std::size_t r = 0; r < aug.size(); ++r) aug[r].push_back(b[r]);
  SymbolicEchelon e = symbolic_rref(aug, cols + 1);
  std::vector<Expr> x(cols, Expr(0));
  for (std::size_t r = 0; r < e.rows.size(); ++r) {
    if (static_cast<std::size_t>(e.pivots[r]) == cols) return std::nullopt;
    x[static_cast<std::size_t>(e.pivots[r])] = e.rows[r][cols];
  }
  return x;
}

std::optional<EMatrix> symbolic_inverse(const EMatrix& m) {
  const std::size_t n = m.size();
  EMatrix aug = m;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) aug[r].push_back(Expr(r == c ? 1 : 0));
  SymbolicEchelon e = symbolic_rref(aug, 2 * n);
  if (e.rows.size() < n || static_cast<std::size_t>(e.pivots[n - 1]) >= n) return std::nullopt;
  EMatrix out(n, std::vector<Expr>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r][c] = e.rows[r][n + c];
  return out;
}

QMatrix evaluate(const EMatrix& m, const expr::ExactPoint& p) {
  QMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) {
    QVector v;
    v.reserve(row.size());
    for (const auto& e : row) v.push_back(expr::evaluate(e, p));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace dirac::linalg
