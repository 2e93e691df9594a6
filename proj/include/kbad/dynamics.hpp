#pragma once

// The psi embedding of prod SL_2(R) into SL_2d(R), the lattice L_K, the
// diagonal flow g_r(t), the unipotent u(x), and systole trajectories.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kbad/numberfield.hpp"

namespace kbad {

using Matrix = Eigen::MatrixXd;

// d blocks of 2x2 matrices, each of determinant 1 within 1e-10.
class GroupElement {
 public:
  // Throws ParameterOutOfRange on a block of determinant away from 1.
  static GroupElement make(std::vector<Eigen::Matrix2d> blocks);
  static GroupElement identity(std::size_t d);

  std::size_t size() const { return blocks_.size(); }
  const Eigen::Matrix2d& block(std::size_t i) const { return blocks_[i]; }
  GroupElement operator*(const GroupElement& other) const;

 private:
  std::vector<Eigen::Matrix2d> blocks_;
};

// [[diag(a), diag(b)], [diag(c), diag(d)]].
Matrix psi(const GroupElement& g);
// diag(e^{r_1 t}, ..., e^{r_d t}, e^{-r_1 t}, ..., e^{-r_d t}).
Matrix flow_matrix(double t, const WeightVector& w);
// [[I, diag(x)], [0, I]].
Matrix u_matrix(std::span<const double> x);

struct LatticeBasis {
  Matrix basis;  // columns
  double covolume = 0.0;

  // Throws SingularBasis.
  static LatticeBasis make(Matrix basis);
};

// Columns D_K^{-1/(2d)} theta(omega_j) in each of the two R^d factors.
LatticeBasis lattice_LK(const FieldSpec& field);

struct SystoleSample {
  double t = 0.0;
  double lambda1 = 0.0;
  std::vector<std::int64_t> vector;  // coefficients over the input basis
};

// LLL reduction of the columns; returns the reduced basis and sets transform
// so that basis * transform = reduced (transform unimodular, integer valued).
Matrix lll_reduce(const Matrix& basis, double delta, Matrix* transform = nullptr);
// Size reduction |mu_ij| <= 1/2 and the Lovasz condition at delta, with slack.
bool lll_conditions_hold(const Matrix& basis, double delta, double slack = 1e-9);

// Exact shortest nonzero vector for dimension <= 8 (LLL at 0.99, then
// Fincke-Pohst enumeration). Throws SingularBasis, ConditionTooHigh above 1e12.
SystoleSample systole(const LatticeBasis& b);
SystoleSample systole(const Matrix& basis);

double condition_number(const Matrix& m);

// Systole of flow_matrix(t) * u_matrix(x) * L_K for every t of the grid.
// OpenMP over contiguous chunks of the grid, each warm-started along t.
std::vector<SystoleSample> trajectory(const FieldSpec& field, const WeightVector& w, std::span<const double> x,
                                      std::span<const double> t_grid);
// Serial reference: every grid point walked independently from t = 0.
std::vector<SystoleSample> trajectory_reference(const FieldSpec& field, const WeightVector& w,
                                                std::span<const double> x, std::span<const double> t_grid);

// Columns t, lambda1, c1..c2d; 17 significant digits.
void write_trajectory_csv(std::ostream& os, std::size_t dimension, const std::vector<SystoleSample>& samples);

}  // namespace kbad
