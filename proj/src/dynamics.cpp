#include "kbad/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <omp.h>

namespace kbad {

namespace {

constexpr double kLllDelta = 0.99;
constexpr double kMaxCondition = 1e12;

std::string format_double_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void gram_schmidt(const Matrix& b, Matrix& mu, Eigen::VectorXd& bstar2) {
  const auto n = b.cols();
  Matrix bstar = b;
  mu = Matrix::Zero(n, n);
  bstar2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      mu(i, j) = b.col(i).dot(bstar.col(j)) / bstar2(j);
      bstar.col(i) -= mu(i, j) * bstar.col(j);
    }
    bstar2(i) = bstar.col(i).squaredNorm();
  }
}

struct Candidate {
  double norm2 = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> coeffs;  // over the original basis
};

void canonicalize(std::vector<std::int64_t>& c) {
  for (auto v : c) {
    if (v == 0) continue;
    if (v < 0)
      for (auto& x : c) x = -x;
    return;
  }
}

// Smaller norm; within a relative 1e-12, smaller l1 norm, then
// lexicographically larger canonical coefficients.
bool better(double n2, const std::vector<std::int64_t>& c, const Candidate& best) {
  if (n2 < best.norm2 * (1 - 1e-12)) return true;
  if (n2 > best.norm2 * (1 + 1e-12)) return false;
  std::int64_t l1a = 0, l1b = 0;
  for (auto v : c) l1a += std::llabs(v);
  for (auto v : best.coeffs) l1b += std::llabs(v);
  if (l1a != l1b) return l1a < l1b;
  return c > best.coeffs;
}

// Fincke-Pohst enumeration on a reduced basis; transform maps reduced
// coefficients back to the original basis.
Candidate shortest_vector(const Matrix& reduced, const Matrix& transform) {
  const auto n = reduced.cols();
  const Matrix G = reduced.transpose() * reduced;
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() != Eigen::Success) throw SingularBasis("Gram matrix is not positive definite");
  const Matrix R = llt.matrixU();
  Eigen::VectorXd qd(n);
  Matrix qo = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    qd(i) = R(i, i) * R(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) qo(i, j) = R(i, j) / R(i, i);
  }
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) bound = std::min(bound, reduced.col(j).squaredNorm());
  bound *= 1 + 1e-9;

  Candidate best;
  std::vector<std::int64_t> x(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd xv(n);
  std::vector<std::int64_t> orig(static_cast<std::size_t>(n));

  auto visit_leaf = [&]() {
    bool zero = true;
    for (auto v : x) zero = zero && v == 0;
    if (zero) return;
    for (Eigen::Index i = 0; i < n; ++i) xv(i) = static_cast<double>(x[static_cast<std::size_t>(i)]);
    const double n2 = (reduced * xv).squaredNorm();
    const Eigen::VectorXd o = transform * xv;
    for (Eigen::Index i = 0; i < n; ++i) orig[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::llround(o(i)));
    canonicalize(orig);
    if (better(n2, orig, best)) {
      best.norm2 = n2;
      best.coeffs = orig;
      bound = std::min(bound, n2 * (1 + 1e-9));
    }
  };

  // Depth-first from the last coordinate.
  auto recurse = [&](auto&& self, Eigen::Index i, double partial) -> void {
    double c = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) c -= qo(i, j) * static_cast<double>(x[static_cast<std::size_t>(j)]);
    const double room = bound - partial;
    if (room < 0) return;
    const double r = std::sqrt(room / qd(i)) + 1e-9;
    const auto lo = static_cast<std::int64_t>(std::ceil(c - r));
    const auto hi = static_cast<std::int64_t>(std::floor(c + r));
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double diff = static_cast<double>(v) - c;
      const double next = partial + qd(i) * diff * diff;
      if (next > bound) continue;
      x[static_cast<std::size_t>(i)] = v;
      if (i == 0)
        visit_leaf();
      else
        self(self, i - 1, next);
    }
    x[static_cast<std::size_t>(i)] = 0;
  };
  recurse(recurse, n - 1, 0.0);
  if (best.coeffs.empty()) throw SingularBasis("enumeration found no nonzero vector");
  return best;
}

SystoleSample systole_unchecked(const Matrix& basis) {
  Matrix transform;
  const Matrix reduced = lll_reduce(basis, kLllDelta, &transform);
  const Candidate best = shortest_vector(reduced, transform);
  SystoleSample s;
  s.lambda1 = std::sqrt(best.norm2);
  s.vector = best.coeffs;
  return s;
}

void check_conditioning(const Matrix& basis) {
  const double cond = condition_number(basis);
  if (!std::isfinite(cond)) throw SingularBasis("basis is singular");
  if (cond > kMaxCondition) throw ConditionTooHigh("basis condition number " + format_double_short(cond) + " exceeds 1e12");
}

// Follows the lattice flow(t) u(x) L_K along t, keeping an integer transform
// whose columns stay LLL-reduced, so that every basis handed to LLL is well
// conditioned even when the flow is not.
class Walker {
 public:
  Walker(const Matrix& a, const WeightVector& w) : a_(a), w_(w), u_(Matrix::Identity(a.rows(), a.cols())) {}

  SystoleSample at(double t) {
    while (std::fabs(t - t_) > 1.0) step(t_ + (t > t_ ? 1.0 : -1.0));
    step(t);
    const Matrix current = flow_matrix(t, w_) * (a_ * u_);
    check_conditioning(current);
    SystoleSample s = systole_unchecked(current);
    // Back to coefficients over L_K.
    Eigen::VectorXd c(static_cast<Eigen::Index>(s.vector.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = static_cast<double>(s.vector[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd o = u_ * c;
    for (Eigen::Index i = 0; i < c.size(); ++i) s.vector[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::llround(o(i)));
    canonicalize(s.vector);
    s.t = t;
    return s;
  }

 private:
  void step(double t) {
    const Matrix b = flow_matrix(t, w_) * (a_ * u_);
    check_conditioning(b);
    Matrix transform;
    lll_reduce(b, kLllDelta, &transform);
    u_ = u_ * transform;
    t_ = t;
  }

  Matrix a_;
  const WeightVector& w_;
  Matrix u_;
  double t_ = 0.0;
};

Matrix trajectory_start(const FieldSpec& field, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(field.degree())) throw std::invalid_argument("x must have one entry per embedding");
  return u_matrix(x) * lattice_LK(field).basis;
}

}  // namespace

GroupElement GroupElement::make(std::vector<Eigen::Matrix2d> blocks) {
  for (const auto& b : blocks)
    if (std::fabs(b.determinant() - 1.0) > 1e-10) throw ParameterOutOfRange("block determinant is not 1");
  GroupElement g;
  g.blocks_ = std::move(blocks);
  return g;
}

GroupElement GroupElement::identity(std::size_t d) {
  return make(std::vector<Eigen::Matrix2d>(d, Eigen::Matrix2d::Identity()));
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (size() != other.size()) throw std::invalid_argument("group elements of different degree");
  GroupElement g;
  for (std::size_t i = 0; i < size(); ++i) g.blocks_.push_back(blocks_[i] * other.blocks_[i]);
  return g;
}

Matrix psi(const GroupElement& g) {
  const auto d = static_cast<Eigen::Index>(g.size());
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& b = g.block(static_cast<std::size_t>(i));
    m(i, i) = b(0, 0);
    m(i, d + i) = b(0, 1);
    m(d + i, i) = b(1, 0);
    m(d + i, d + i) = b(1, 1);
  }
  return m;
}

Matrix flow_matrix(double t, const WeightVector& w) {
  const auto d = static_cast<Eigen::Index>(w.size());
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double r = w.weight_d(static_cast<std::size_t>(i));
    m(i, i) = std::exp(r * t);
    m(d + i, d + i) = std::exp(-r * t);
  }
  return m;
}

Matrix u_matrix(std::span<const double> x) {
  const auto d = static_cast<Eigen::Index>(x.size());
  Matrix m = Matrix::Identity(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, d + i) = x[static_cast<std::size_t>(i)];
  return m;
}

LatticeBasis LatticeBasis::make(Matrix basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0) throw SingularBasis("basis must be a nonempty square matrix");
  const double det = basis.determinant();
  if (!(std::fabs(det) > 0) || !std::isfinite(det)) throw SingularBasis("basis has zero determinant");
  return LatticeBasis{std::move(basis), std::fabs(det)};
}

LatticeBasis lattice_LK(const FieldSpec& field) {
  const auto d = static_cast<Eigen::Index>(field.degree());
  const double disc = field.disc().convert_to<double>();
  const double scale = std::pow(disc, -1.0 / (2.0 * static_cast<double>(d)));
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double e = scale * field.embedding_entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).mid();
      m(i, j) = e;
      m(d + i, d + j) = e;
    }
  return LatticeBasis::make(std::move(m));
}

Matrix lll_reduce(const Matrix& basis, double delta, Matrix* transform) {
  Matrix b = basis;
  const auto n = b.cols();
  Matrix u = Matrix::Identity(n, n);
  Matrix mu;
  Eigen::VectorXd bstar2;
  gram_schmidt(b, mu, bstar2);
  Eigen::Index k = 1;
  long guard = 0;
  while (k < n) {
    if (++guard > 1000000) throw ConditionTooHigh("LLL did not terminate");
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(mu(k, j));
      if (q != 0.0) {
        b.col(k) -= q * b.col(j);
        u.col(k) -= q * u.col(j);
        for (Eigen::Index l = 0; l <= j; ++l) mu(k, l) -= q * (l == j ? 1.0 : mu(j, l));
      }
    }
    if (bstar2(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar2(k - 1)) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      gram_schmidt(b, mu, bstar2);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  if (transform) *transform = u;
  return b;
}

bool lll_conditions_hold(const Matrix& basis, double delta, double slack) {
  Matrix mu;
  Eigen::VectorXd bstar2;
  gram_schmidt(basis, mu, bstar2);
  const auto n = basis.cols();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::fabs(mu(i, j)) > 0.5 + slack) return false;
  for (Eigen::Index k = 1; k < n; ++k)
    if (bstar2(k) < (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar2(k - 1) * (1 - slack)) return false;
  return true;
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > 0)) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

SystoleSample systole(const Matrix& basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0) throw SingularBasis("basis must be a nonempty square matrix");
  if (basis.rows() > 8) throw std::invalid_argument("exact systole is implemented up to dimension 8");
  check_conditioning(basis);
  return systole_unchecked(basis);
}

SystoleSample systole(const LatticeBasis& b) { return systole(b.basis); }

std::vector<SystoleSample> trajectory(const FieldSpec& field, const WeightVector& w, std::span<const double> x,
                                      std::span<const double> t_grid) {
  const Matrix a = trajectory_start(field, x);
  const auto n = static_cast<std::int64_t>(t_grid.size());
  std::vector<SystoleSample> out(t_grid.size());
  bool failed = false;
  std::string name, what;
#pragma omp parallel
  {
    const std::int64_t threads = omp_get_num_threads();
    const std::int64_t id = omp_get_thread_num();
    const std::int64_t begin = n * id / threads, end = n * (id + 1) / threads;
    try {
      Walker walker(a, w);
      for (std::int64_t i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = walker.at(t_grid[static_cast<std::size_t>(i)]);
    } catch (const Error& e) {
#pragma omp critical(kbad_trajectory_failure)
      {
        failed = true;
        name = e.name();
        what = e.detail();
      }
    }
  }
  if (failed) {
    if (name == "ConditionTooHigh") throw ConditionTooHigh(what);
    throw SingularBasis(what);
  }
  return out;
}

std::vector<SystoleSample> trajectory_reference(const FieldSpec& field, const WeightVector& w,
                                                std::span<const double> x, std::span<const double> t_grid) {
  const Matrix a = trajectory_start(field, x);
  std::vector<SystoleSample> out;
  for (double t : t_grid) {
    Walker walker(a, w);
    out.push_back(walker.at(t));
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, std::size_t dimension, const std::vector<SystoleSample>& samples) {
  os << "t,lambda1";
  for (std::size_t i = 0; i < dimension; ++i) os << ",c" << (i + 1);
  os << '\n';
  char buf[40];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.t);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g", s.lambda1);
    os << ',' << buf;
    for (auto c : s.vector) os << ',' << c;
    os << '\n';
  }
}

}  // namespace kbad
