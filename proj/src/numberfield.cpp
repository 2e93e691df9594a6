#include "kbad/numberfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace kbad {

namespace {

using Poly = std::vector<Rational>;  // constant term first

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

Poly poly_rem(Poly a, const Poly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    const Rational factor = a.back() / b.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= factor * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

Poly poly_gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Rational eval(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

class SturmChain {
 public:
  explicit SturmChain(const Poly& f) {
    chain_.push_back(f);
    chain_.push_back(derivative(f));
    while (!chain_.back().empty() && chain_.back().size() > 1) {
      Poly r = poly_rem(chain_[chain_.size() - 2], chain_.back());
      if (r.empty()) break;
      for (auto& c : r) c = -c;
      chain_.push_back(std::move(r));
    }
  }

  int sign_changes(const Rational& x) const {
    int changes = 0, last = 0;
    for (const auto& p : chain_) {
      const int s = sign(eval(p, x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  }

  // Number of distinct real roots in (a, b].
  int count(const Rational& a, const Rational& b) const { return sign_changes(a) - sign_changes(b); }

 private:
  std::vector<Poly> chain_;
};

RationalInterval ri_mul(const RationalInterval& a, const RationalInterval& b) {
  const Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

RationalInterval ri_add(const RationalInterval& a, const RationalInterval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

RationalInterval ri_scale(const RationalInterval& a, const Rational& c) {
  if (c >= 0) return {a.lo * c, a.hi * c};
  return {a.hi * c, a.lo * c};
}

// Root enclosures in ascending order, each of width <= 2^-200.
std::vector<RationalInterval> isolate_roots(const Poly& f, const SturmChain& sturm) {
  Rational bound = 1;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) bound = std::max(bound, Rational(1 + abs(f[i] / f.back())));
  std::vector<RationalInterval> pending{{-bound, bound}};
  std::vector<RationalInterval> isolated;
  while (!pending.empty()) {
    RationalInterval iv = pending.back();
    pending.pop_back();
    const int n = sturm.count(iv.lo, iv.hi);
    if (n == 0) continue;
    if (n == 1) {
      isolated.push_back(iv);
      continue;
    }
    const Rational m = (iv.lo + iv.hi) / 2;
    pending.push_back({iv.lo, m});
    pending.push_back({m, iv.hi});
  }
  const Rational target = Rational(1) / (BigInt(1) << 200);
  for (auto& iv : isolated) {
    // The root lies in (lo, hi]; shrink while keeping exactly one root inside.
    while (iv.hi - iv.lo > target) {
      const Rational m = (iv.lo + iv.hi) / 2;
      if (sturm.count(iv.lo, m) == 1)
        iv.hi = m;
      else
        iv.lo = m;
    }
  }
  std::sort(isolated.begin(), isolated.end(),
            [](const RationalInterval& a, const RationalInterval& b) { return a.lo < b.lo; });
  return isolated;
}

// Determinant of an integer matrix by fraction-free elimination.
BigInt bareiss_det(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  BigInt prev = 1;
  int sgn = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sgn = -sgn;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sgn * m[n - 1][n - 1];
}

Rational rational_det(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m[piv][k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      std::swap(m[piv], m[k]);
      det = -det;
    }
    det *= m[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const Rational f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return det;
}

std::optional<std::vector<std::vector<Rational>>> rational_inverse(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m[piv][k] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[k]);
    std::swap(inv[piv], inv[k]);
    const Rational p = m[k][k];
    for (std::size_t j = 0; j < n; ++j) {
      m[k][j] /= p;
      inv[k][j] /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m[i][k] == 0) continue;
      const Rational f = m[i][k];
      for (std::size_t j = 0; j < n; ++j) {
        m[i][j] -= f * m[k][j];
        inv[i][j] -= f * inv[k][j];
      }
    }
  }
  return inv;
}

// Discriminant of a monic polynomial via the Sylvester resultant with its
// derivative.
Rational poly_discriminant(const Poly& f) {
  const Poly df = derivative(f);
  const std::size_t m = f.size() - 1, n = df.size() - 1;
  const std::size_t size = m + n;
  std::vector<std::vector<Rational>> syl(size, std::vector<Rational>(size, 0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) syl[r][r + i] = f[m - i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) syl[n + r][r + i] = df[n - i];
  const Rational res = rational_det(syl);
  return ((m * (m - 1) / 2) % 2 == 0) ? res : -res;
}

Poly mul_mod(const Poly& a, const Poly& b, const Poly& f) {
  Poly prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += a[i] * b[j];
  Poly r = poly_rem(prod, f);
  r.resize(f.size() - 1, 0);
  return r;
}

bool is_integer(const Rational& r) { return denominator(r) == 1; }

std::int64_t checked_int64(const BigInt& v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw ArithmeticOverflow(std::string(what) + " does not fit in 64 bits");
  return static_cast<std::int64_t>(v);
}

// Largest f with f^2 | n, for n > 0.
std::int64_t square_part_root(std::int64_t n) {
  std::int64_t root = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      root *= p;
    }
  }
  return root;
}

std::vector<std::vector<Rational>> quadratic_basis(const std::vector<std::int64_t>& poly, BigInt& disc_out) {
  const std::int64_t c = poly[0], b = poly[1];
  const std::int64_t delta = b * b - 4 * c;
  if (delta < 0) throw NotTotallyReal("x^2 + " + std::to_string(b) + "x + " + std::to_string(c) + " has no real roots");
  const std::int64_t f = square_part_root(delta);
  const std::int64_t d0 = delta / (f * f);
  if (d0 == 1) throw NotIrreducible("polynomial splits over Q (discriminant is a square)");
  // sqrt(d0) = (2a + b) / f for a root a.
  const Rational s0 = Rational(b, f), s1 = Rational(2, f);
  const std::int64_t residue = ((d0 % 4) + 4) % 4;
  if (residue == 1) {
    disc_out = d0;
    return {{1, 0}, {(1 + s0) / 2, s1 / 2}};
  }
  disc_out = 4 * BigInt(d0);
  return {{1, 0}, {s0, s1}};
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t.empty()) throw ParseError("empty rational");
  const auto slash = t.find('/');
  auto parse_int = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("+-0123456789") != std::string::npos ||
        s.find_first_of("0123456789") == std::string::npos)
      throw ParseError("not a rational: '" + text + "'");
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  };
  if (slash == std::string::npos) return Rational(parse_int(t));
  const BigInt den = parse_int(t.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return Rational(parse_int(t.substr(0, slash)), den);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Interval to_interval(const RationalInterval& r) {
  return {round_down(r.lo.convert_to<double>()), round_up(r.hi.convert_to<double>())};
}

bool FieldElement::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](std::int64_t c) { return c == 0; });
}

std::string to_string(const FieldElement& q) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < q.coords.size(); ++i) os << (i ? "," : "") << q.coords[i];
  os << ')';
  return os.str();
}

// ---- WeightVector ----

WeightVector WeightVector::make(std::vector<Rational> weights) {
  if (weights.empty()) throw InvalidWeights("no weights");
  Rational sum = 0;
  for (const auto& w : weights) {
    if (w < 0) throw InvalidWeights("negative weight " + kbad::to_string(w));
    sum += w;
  }
  if (sum != 1) throw InvalidWeights("weights sum to " + kbad::to_string(sum) + ", expected 1");
  WeightVector out;
  out.weights_ = std::move(weights);
  for (std::size_t i = 0; i < out.weights_.size(); ++i) {
    const Rational& w = out.weights_[i];
    out.weights_d_.push_back(w.convert_to<double>());
    out.inv_weights_d_.push_back(w > 0 ? Rational(1 / w).convert_to<double>() : 0.0);
    (w > 0 ? out.s1_ : out.s2_).push_back(i);
    if (w > out.weights_[out.omega_]) out.omega_ = i;
  }
  return out;
}

WeightVector WeightVector::parse(const std::string& comma_separated) {
  std::vector<Rational> ws;
  std::stringstream ss(comma_separated);
  std::string item;
  while (std::getline(ss, item, ',')) ws.push_back(parse_rational(item));
  return make(std::move(ws));
}

double WeightVector::r_min_positive_d() const {
  double m = 1.0;
  for (auto i : s1_) m = std::min(m, weights_d_[i]);
  return m;
}

std::string WeightVector::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += (i ? "," : "") + kbad::to_string(weights_[i]);
  return s;
}

// ---- FieldSpec ----

FieldSpec make_field(const std::vector<std::int64_t>& min_poly,
                     const std::optional<std::vector<std::vector<Rational>>>& integral_basis) {
  if (min_poly.size() < 3) throw InvalidField("degree must be at least 2");
  if (min_poly.back() != 1) throw InvalidField("minimal polynomial must be monic");
  const int d = static_cast<int>(min_poly.size()) - 1;
  const auto du = static_cast<std::size_t>(d);

  Poly f;
  for (auto c : min_poly) f.emplace_back(c);
  const Poly g = poly_gcd(f, derivative(f));
  if (g.size() > 1) throw NotSquarefree("gcd(f, f') has positive degree");

  const SturmChain sturm(f);
  auto roots = isolate_roots(f, sturm);
  if (static_cast<int>(roots.size()) < d)
    throw NotTotallyReal(std::to_string(roots.size()) + " real roots for degree " + std::to_string(d));

  FieldSpec out;
  out.degree_ = d;
  out.min_poly_ = min_poly;
  out.roots_ = std::move(roots);

  BigInt quadratic_disc = 0;
  if (integral_basis) {
    out.basis_ = *integral_basis;
    if (out.basis_.size() != du) throw InvalidField("integral basis must have d rows");
    for (auto& row : out.basis_) {
      if (row.size() != du) throw InvalidField("integral basis rows must have d entries");
    }
  } else if (d == 2) {
    out.basis_ = quadratic_basis(min_poly, quadratic_disc);
  } else {
    throw InvalidField("an integral basis must be supplied for degree >= 3");
  }

  const auto inv = rational_inverse(out.basis_);
  if (!inv) throw BasisNotClosed("basis is linearly dependent");
  auto to_basis = [&](const Poly& power) {
    std::vector<Rational> c(du, 0);
    for (std::size_t j = 0; j < du; ++j)
      for (std::size_t k = 0; k < du; ++k) c[j] += power[k] * (*inv)[k][j];
    return c;
  };
  for (std::size_t p = 0; p < 2; ++p) {
    Poly e(du, 0);
    e[p] = 1;
    for (const auto& c : to_basis(e))
      if (!is_integer(c)) throw BasisNotClosed(p == 0 ? "1 is not in the Z-span of the basis"
                                                      : "the root is not in the Z-span of the basis");
  }

  out.table_.assign(du * du * du, 0);
  for (std::size_t i = 0; i < du; ++i) {
    for (std::size_t j = i; j < du; ++j) {
      const auto coords = to_basis(mul_mod(out.basis_[i], out.basis_[j], f));
      for (std::size_t k = 0; k < du; ++k) {
        if (!is_integer(coords[k]))
          throw BasisNotClosed("basis_" + std::to_string(i) + " * basis_" + std::to_string(j) +
                               " has non-integral coordinates");
        const std::int64_t v = checked_int64(numerator(coords[k]), "structure constant");
        out.table_[(i * du + j) * du + k] = v;
        out.table_[(j * du + i) * du + k] = v;
      }
    }
  }
  out.trace_.assign(du, 0);
  for (std::size_t i = 0; i < du; ++i)
    for (std::size_t k = 0; k < du; ++k) out.trace_[i] += out.table_[(i * du + k) * du + k];

  std::vector<std::vector<BigInt>> gram(du, std::vector<BigInt>(du, 0));
  for (std::size_t i = 0; i < du; ++i)
    for (std::size_t j = 0; j < du; ++j)
      for (std::size_t k = 0; k < du; ++k)
        gram[i][j] += BigInt(out.table_[(i * du + j) * du + k]) * out.trace_[k];
  out.disc_ = bareiss_det(gram);

  const Rational basis_det = rational_det(out.basis_);
  if (poly_discriminant(f) * basis_det * basis_det != Rational(out.disc_))
    throw BasisNotClosed("trace-form discriminant is inconsistent with disc(f) and the basis index");
  if (d == 2 && !integral_basis && out.disc_ != quadratic_disc)
    throw InvalidField("internal: quadratic discriminant mismatch");

  out.emb_exact_.resize(du * du);
  out.emb_.resize(du * du);
  for (std::size_t i = 0; i < du; ++i) {
    std::vector<RationalInterval> powers{{1, 1}};
    for (std::size_t k = 1; k < du; ++k) powers.push_back(ri_mul(powers.back(), out.roots_[i]));
    for (std::size_t j = 0; j < du; ++j) {
      RationalInterval acc{0, 0};
      for (std::size_t k = 0; k < du; ++k) acc = ri_add(acc, ri_scale(powers[k], out.basis_[j][k]));
      out.emb_exact_[i * du + j] = acc;
      out.emb_[i * du + j] = to_interval(acc);
    }
  }

  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < du; ++i)
    for (std::size_t j = 0; j < du; ++j) m(i, j) = out.emb_[i * du + j].mid();
  const double det_m = m.determinant();
  const double disc_d = out.disc_.convert_to<double>();
  if (std::fabs(det_m * det_m - disc_d) > 1e-6 * std::fabs(disc_d))
    throw InvalidField("embedding determinant does not match the discriminant");
  const Eigen::MatrixXd minv = m.inverse();
  out.inv_emb_bound_.resize(du * du);
  out.inv_emb_.resize(du * du);
  for (std::size_t j = 0; j < du; ++j)
    for (std::size_t i = 0; i < du; ++i)
    {
      out.inv_emb_[j * du + i] = minv(j, i);
      out.inv_emb_bound_[j * du + i] = std::fabs(minv(j, i)) * (1 + 1e-9) + 1e-12;
    }
  return out;
}

FieldElement FieldSpec::zero() const { return {std::vector<std::int64_t>(static_cast<std::size_t>(degree_), 0)}; }

FieldElement FieldSpec::one() const {
  // 1 has integral coordinates (checked in make_field); the standard bases
  // put it first, otherwise solve through the table.
  FieldElement e = zero();
  const auto du = static_cast<std::size_t>(degree_);
  if (basis_[0][0] == 1 && std::all_of(basis_[0].begin() + 1, basis_[0].end(), [](const Rational& r) { return r == 0; })) {
    e.coords[0] = 1;
    return e;
  }
  auto inv = rational_inverse(basis_);
  for (std::size_t j = 0; j < du; ++j) e.coords[j] = static_cast<std::int64_t>(numerator((*inv)[0][j]));
  return e;
}

FieldElement FieldSpec::from_coords(std::vector<std::int64_t> coords) const {
  if (coords.size() != static_cast<std::size_t>(degree_)) throw InvalidField("coordinate count does not match the degree");
  return {std::move(coords)};
}

FieldElement FieldSpec::add(const FieldElement& a, const FieldElement& b) const {
  FieldElement r = zero();
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    if (__builtin_add_overflow(a.coords[i], b.coords[i], &r.coords[i])) throw ArithmeticOverflow("add");
  return r;
}

FieldElement FieldSpec::sub(const FieldElement& a, const FieldElement& b) const {
  FieldElement r = zero();
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    if (__builtin_sub_overflow(a.coords[i], b.coords[i], &r.coords[i])) throw ArithmeticOverflow("sub");
  return r;
}

FieldElement FieldSpec::neg(const FieldElement& a) const {
  FieldElement r = zero();
  for (std::size_t i = 0; i < r.coords.size(); ++i)
    if (__builtin_sub_overflow(std::int64_t{0}, a.coords[i], &r.coords[i])) throw ArithmeticOverflow("neg");
  return r;
}

FieldElement FieldSpec::mul(const FieldElement& a, const FieldElement& b) const {
  const auto d = static_cast<std::size_t>(degree_);
  FieldElement r = zero();
  for (std::size_t k = 0; k < d; ++k) {
    __int128 acc = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (a.coords[i] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const std::int64_t t = table_[(i * d + j) * d + k];
        if (t == 0 || b.coords[j] == 0) continue;
        const __int128 term = static_cast<__int128>(a.coords[i]) * b.coords[j];
        __int128 scaled;
        if (__builtin_mul_overflow(term, static_cast<__int128>(t), &scaled) ||
            __builtin_add_overflow(acc, scaled, &acc))
          throw ArithmeticOverflow("mul");
      }
    }
    if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min())
      throw ArithmeticOverflow("mul");
    r.coords[k] = static_cast<std::int64_t>(acc);
  }
  return r;
}

BigInt FieldSpec::norm(const FieldElement& q) const {
  const auto d = static_cast<std::size_t>(degree_);
  std::vector<std::vector<BigInt>> m(d, std::vector<BigInt>(d, 0));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i) m[k][j] += BigInt(q.coords[i]) * table_[(i * d + j) * d + k];
  return bareiss_det(m);
}

BigInt FieldSpec::trace(const FieldElement& q) const {
  BigInt t = 0;
  for (std::size_t i = 0; i < q.coords.size(); ++i) t += BigInt(q.coords[i]) * trace_[i];
  return t;
}

std::string FieldSpec::describe() const {
  std::ostringstream os;
  os << "degree " << degree_ << ", min_poly";
  for (auto c : min_poly_) os << ' ' << c;
  os << ", D_K = " << disc_;
  return os.str();
}

// ---- embeddings, norm, height ----

std::vector<double> embed_approx(const FieldSpec& field, const FieldElement& q) {
  const auto d = static_cast<std::size_t>(field.degree());
  std::vector<double> out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i] += static_cast<double>(q.coords[j]) * field.embedding_entry(i, j).mid();
  return out;
}

namespace {

std::vector<Interval> embed_fast(const FieldSpec& field, const FieldElement& q) {
  const auto d = static_cast<std::size_t>(field.degree());
  std::vector<Interval> out(d, Interval(0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (q.coords[j] == 0) continue;
      // int64 -> double may round for |c| > 2^53; enclose the conversion.
      const double c = static_cast<double>(q.coords[j]);
      const Interval ci = (std::fabs(c) < 9007199254740992.0) ? Interval(c) : Interval(round_down(c), round_up(c));
      out[i] = out[i] + ci * field.embedding_entry(i, j);
    }
  return out;
}

Interval embed_exact_coordinate(const FieldSpec& field, const FieldElement& q, std::size_t i) {
  RationalInterval acc{0, 0};
  for (std::size_t j = 0; j < q.coords.size(); ++j) {
    if (q.coords[j] == 0) continue;
    acc = ri_add(acc, ri_scale(field.embedding_entry_exact(i, j), Rational(q.coords[j])));
  }
  return to_interval(acc);
}

}  // namespace

std::vector<Interval> embed(const FieldSpec& field, const FieldElement& q, double precision) {
  auto out = embed_fast(field, q);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].width() > precision) out[i] = embed_exact_coordinate(field, q, i);
  return out;
}

std::vector<Interval> embed_certified(const FieldSpec& field, const FieldElement& q) {
  auto out = embed_fast(field, q);
  const bool zero = q.is_zero();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool lost = zero ? out[i].width() > 0 : (out[i].contains_zero() || out[i].width() > 1e-9 * out[i].mig());
    if (lost) out[i] = embed_exact_coordinate(field, q, i);
  }
  return out;
}

double weighted_norm(std::span<const double> x, const WeightVector& w) {
  double m = 0.0;
  for (auto i : w.s1()) m = std::max(m, std::pow(std::fabs(x[i]), w.inv_weight_d(i)));
  return m;
}

Interval weighted_norm(std::span<const Interval> x, const WeightVector& w) {
  Interval m(0.0);
  for (auto i : w.s1()) m = imax(m, pow_abs(x[i], w.inv_weight_d(i)));
  return m;
}

ElementMetrics element_metrics(std::vector<Interval> embeddings, const WeightVector& w) {
  ElementMetrics m;
  m.embeddings = std::move(embeddings);
  m.r_norm = weighted_norm(std::span<const Interval>(m.embeddings), w);
  m.height = Interval(0.0);
  for (auto i : w.s1()) m.height = imax(m.height, abs(m.embeddings[i]) * pow_abs(m.r_norm, w.weight_d(i)));
  return m;
}

ElementMetrics element_metrics(const FieldSpec& field, const FieldElement& q, const WeightVector& w) {
  if (static_cast<int>(w.size()) != field.degree()) throw InvalidWeights("weight count does not match the degree");
  return element_metrics(embed_certified(field, q), w);
}

Interval height(const FieldSpec& field, const FieldElement& q, const WeightVector& w) {
  if (q.is_zero()) throw ZeroElement("height of 0");
  return element_metrics(field, q, w).height;
}

}  // namespace kbad
