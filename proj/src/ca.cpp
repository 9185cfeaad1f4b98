#include "lexatlas/ca.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SVD>

#include "lexatlas/error.hpp"

namespace lexatlas {

void IncidenceMatrix::validate() const {
  if (cells.rows() < 1 || cells.cols() < 1) throw InvalidArgument("incidence matrix must be at least 1x1");
  if (static_cast<Eigen::Index>(row_ids.size()) != cells.rows() ||
      static_cast<Eigen::Index>(columns.size()) != cells.cols()) {
    throw InvalidArgument("incidence labels do not match matrix dimensions");
  }
  for (Eigen::Index i = 0; i < cells.rows(); ++i) {
    for (Eigen::Index j = 0; j < cells.cols(); ++j) {
      double v = cells(i, j);
      if (v != 0.0 && v != 1.0) throw InvalidArgument("incidence cells must be 0 or 1");
    }
  }
  if ((cells.rowwise().sum().array() == 0.0).any()) throw InvalidArgument("incidence matrix has an all-zero row");
  if ((cells.colwise().sum().array() == 0.0).any()) throw InvalidArgument("incidence matrix has an all-zero column");
}

IncidenceMatrix build_incidence(std::span<const Clique> cliques) {
  if (cliques.empty()) throw InvalidArgument("no senses to project");
  std::set<LexicalUnit> units;
  for (const auto& c : cliques) units.insert(c.members.begin(), c.members.end());
  IncidenceMatrix m;
  m.columns.assign(units.begin(), units.end());
  m.cells = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cliques.size()), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    m.row_ids.push_back(cliques[i].id);
    for (const auto& member : cliques[i].members) {
      auto j = std::lower_bound(m.columns.begin(), m.columns.end(), member) - m.columns.begin();
      m.cells(static_cast<Eigen::Index>(i), j) = 1.0;
    }
  }
  return m;
}

IncidenceMatrix incidence_from_cells(const Eigen::MatrixXd& cells) {
  IncidenceMatrix m;
  m.cells = cells;
  for (Eigen::Index i = 0; i < cells.rows(); ++i) m.row_ids.push_back("r" + std::to_string(i));
  for (Eigen::Index j = 0; j < cells.cols(); ++j) m.columns.push_back(LexicalUnit{"c" + std::to_string(j), Pos::X});
  return m;
}

bool SemanticMap::operator==(const SemanticMap& o) const {
  auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
  };
  return target == o.target && clique_ids == o.clique_ids && contexts == o.contexts &&
         same(clique_coords, o.clique_coords) && same(context_coords, o.context_coords) && inertias == o.inertias &&
         total_inertia == o.total_inertia && axes_2d == o.axes_2d;
}

Residuals standardized_residuals(const Eigen::MatrixXd& cells, Execution exec) {
  Residuals r;
  const Eigen::Index rows = cells.rows();
  const Eigen::Index cols = cells.cols();
  r.grand_total = cells.sum();
  if (!(r.grand_total > 0.0)) throw InvalidArgument("incidence matrix has no mass");
  r.row_mass.resize(rows);
  r.col_mass.resize(cols);
  r.standardized.resize(rows, cols);
  const double n = r.grand_total;

  if (exec == Execution::Serial) {
    for (Eigen::Index i = 0; i < rows; ++i) r.row_mass(i) = cells.row(i).sum() / n;
    for (Eigen::Index j = 0; j < cols; ++j) r.col_mass(j) = cells.col(j).sum() / n;
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        const double expected = r.row_mass(i) * r.col_mass(j);
        r.standardized(i, j) = (cells(i, j) / n - expected) / std::sqrt(expected);
      }
    }
    return r;
  }

  // Each cell depends only on its own row/column sums, so the parallel
  // result is bit-identical to the serial one.
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i) r.row_mass(i) = cells.row(i).sum() / n;
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < cols; ++j) r.col_mass(j) = cells.col(j).sum() / n;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double expected = r.row_mass(i) * r.col_mass(j);
      r.standardized(i, j) = (cells(i, j) / n - expected) / std::sqrt(expected);
    }
  }
  return r;
}

namespace {

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

template <typename Svd>
ThinSvd take(const Svd& svd) {
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Orthonormal factors that reproduce `s` and its squared norm.
bool trustworthy(const ThinSvd& f, const Eigen::MatrixXd& s) {
  if (!f.u.allFinite() || !f.sigma.allFinite() || !f.v.allFinite()) return false;
  const double scale = std::max(1.0, s.squaredNorm());
  const double tol = 1e-10 * scale;
  if (std::abs(f.sigma.squaredNorm() - s.squaredNorm()) > tol) return false;
  const auto k = f.sigma.size();
  if ((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(k, k)).norm() > 1e-9) return false;
  if ((f.v.transpose() * f.v - Eigen::MatrixXd::Identity(k, k)).norm() > 1e-9) return false;
  return (f.u * f.sigma.asDiagonal() * f.v.transpose() - s).norm() <= 1e-10 * std::sqrt(scale);
}

// BDCSVD first; Jacobi when the divide-and-conquer result fails the checks
// (Eigen 3.4.0 BDCSVD drops singular values on some rank-deficient inputs).
ThinSvd thin_svd(const Eigen::MatrixXd& s) {
  Eigen::BDCSVD<Eigen::MatrixXd> fast(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (fast.info() == Eigen::Success) {
    ThinSvd f = take(fast);
    if (trustworthy(f, s)) return f;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> slow(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (slow.info() != Eigen::Success) throw NumericalError("SVD of standardized residuals failed");
  ThinSvd f = take(slow);
  if (!f.sigma.allFinite()) throw NumericalError("SVD produced non-finite singular values");
  return f;
}

}  // namespace

SemanticMap correspondence_analysis(const IncidenceMatrix& matrix, double tol, Execution exec) {
  if (!(tol >= 0.0)) throw InvalidArgument("tolerance must be non-negative");
  matrix.validate();

  SemanticMap map;
  map.clique_ids = matrix.row_ids;
  map.contexts = matrix.columns;
  const Eigen::Index rows = matrix.rows();
  const Eigen::Index cols = matrix.cols();

  Residuals res = standardized_residuals(matrix.cells, exec);
  map.total_inertia = res.standardized.squaredNorm();

  const ThinSvd svd = thin_svd(res.standardized);
  const Eigen::VectorXd& sigma = svd.sigma;

  const Eigen::Index max_axes = std::min(rows, cols) - 1;
  Eigen::Index kept = 0;
  while (kept < sigma.size() && kept < max_axes && sigma(kept) > tol) ++kept;

  const Eigen::VectorXd row_scale = res.row_mass.array().rsqrt();
  const Eigen::VectorXd col_scale = res.col_mass.array().rsqrt();
  map.clique_coords = row_scale.asDiagonal() * svd.u.leftCols(kept) * sigma.head(kept).asDiagonal();
  map.context_coords = col_scale.asDiagonal() * svd.v.leftCols(kept) * sigma.head(kept).asDiagonal();

  for (Eigen::Index a = 0; a < kept; ++a) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      double mag = std::abs(map.clique_coords(i, a));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (map.clique_coords(arg, a) < 0.0) {
      map.clique_coords.col(a) *= -1.0;
      map.context_coords.col(a) *= -1.0;
    }
    map.inertias.push_back(sigma(a) * sigma(a));
  }
  for (int a = 0; a < std::min<Eigen::Index>(kept, 2); ++a) map.axes_2d.push_back(a);
  return map;
}

double chi_square_row_distance(const IncidenceMatrix& matrix, Eigen::Index i, Eigen::Index j) {
  const auto& m = matrix.cells;
  if (i < 0 || j < 0 || i >= m.rows() || j >= m.rows()) throw InvalidArgument("row index out of range");
  const double n = m.sum();
  const double ri = m.row(i).sum();
  const double rj = m.row(j).sum();
  double d2 = 0.0;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double ck = m.col(k).sum() / n;
    const double diff = m(i, k) / ri - m(j, k) / rj;
    d2 += diff * diff / ck;
  }
  return std::sqrt(d2);
}

}  // namespace lexatlas
