#pragma once

// Correspondence analysis of clique/context incidence tables.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lexatlas/graph.hpp"
#include "lexatlas/unit.hpp"

namespace lexatlas {

// Binary clique x context-unit membership table. Rows follow clique order,
// columns are sorted units.
struct IncidenceMatrix {
  std::vector<std::string> row_ids;
  std::vector<LexicalUnit> columns;
  Eigen::MatrixXd cells;

  Eigen::Index rows() const { return cells.rows(); }
  Eigen::Index cols() const { return cells.cols(); }

  // Throws InvalidArgument on non-binary cells, empty dimensions, label
  // count mismatches or an all-zero row or column.
  void validate() const;
};

// Throws InvalidArgument("no senses to project") for an empty clique set.
IncidenceMatrix build_incidence(std::span<const Clique> cliques);

// Wraps a raw 0/1 matrix with synthetic labels r0.., c0...
IncidenceMatrix incidence_from_cells(const Eigen::MatrixXd& cells);

struct SemanticMap {
  LexicalUnit target;
  std::vector<std::string> clique_ids;   // row labels
  std::vector<LexicalUnit> contexts;     // column labels
  Eigen::MatrixXd clique_coords;         // rows x axes, principal coordinates
  Eigen::MatrixXd context_coords;        // cols x axes, principal coordinates
  std::vector<double> inertias;          // squared singular values of retained axes
  double total_inertia = 0.0;            // sum over all axes, retained or not
  std::vector<int> axes_2d;              // up to two display axes

  std::size_t axis_count() const { return inertias.size(); }
  bool operator==(const SemanticMap& o) const;
};

enum class Execution { Serial, Parallel };

// Standardized residuals (P - r c^T) / sqrt(r c^T) together with the masses.
struct Residuals {
  double grand_total = 0.0;
  Eigen::VectorXd row_mass;
  Eigen::VectorXd col_mass;
  Eigen::MatrixXd standardized;
};

Residuals standardized_residuals(const Eigen::MatrixXd& cells, Execution exec = Execution::Parallel);

// Singular values <= tol are dropped. Within every retained axis the row
// coordinate of largest magnitude is positive.
SemanticMap correspondence_analysis(const IncidenceMatrix& matrix, double tol = 1e-9,
                                    Execution exec = Execution::Parallel);

// Chi-square distance between the profiles of rows i and j.
double chi_square_row_distance(const IncidenceMatrix& matrix, Eigen::Index i, Eigen::Index j);

}  // namespace lexatlas
