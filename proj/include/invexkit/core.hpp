// Core value types for invexkit: vectors, domains, subgradient sets in
// smooth-plus-box form, kernel functions with structural identity, function
// objects, and check reports.
//
// Everything here is an immutable value after construction and safe to share
// between threads.  Errors are thrown as subclasses of invexkit::Error; no
// routine returns an infinity/NaN sentinel.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invexkit {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define INVEXKIT_DEFINE_ERROR(NAME)              \
  class NAME : public Error {                    \
   public:                                       \
    using Error::Error;                          \
  }

INVEXKIT_DEFINE_ERROR(DomainError);            // point outside a declared domain
INVEXKIT_DEFINE_ERROR(DimMismatch);            // inconsistent vector dimensions
INVEXKIT_DEFINE_ERROR(InvalidSpec);            // malformed construction request
INVEXKIT_DEFINE_ERROR(ParamError);             // parameter outside its legal range
INVEXKIT_DEFINE_ERROR(SignViolation);          // sampled sign precondition failed
INVEXKIT_DEFINE_ERROR(RangeError);             // inner value left a scalar map's interval
INVEXKIT_DEFINE_ERROR(SingularJacobian);       // inverse-Jacobian identity check failed
INVEXKIT_DEFINE_ERROR(RepresentationError);    // result not expressible in smooth+box form
INVEXKIT_DEFINE_ERROR(KernelMismatch);         // kernels not structurally equal
INVEXKIT_DEFINE_ERROR(MissingKernel);          // operation needs a kernel that is absent
INVEXKIT_DEFINE_ERROR(UncertifiedFunction);    // operation needs an invexity certificate
INVEXKIT_DEFINE_ERROR(CombinatorialLimit);     // too many box corners to enumerate
INVEXKIT_DEFINE_ERROR(NonFiniteValue);         // eval/subdiff produced inf or NaN
INVEXKIT_DEFINE_ERROR(NotScaledDifference);    // structural test got the wrong kernel form
INVEXKIT_DEFINE_ERROR(UnknownEntry);           // no such catalog entry / property / figure
INVEXKIT_DEFINE_ERROR(InsufficientFeasibleSamples);  // rejection sampling starved

#undef INVEXKIT_DEFINE_ERROR

// Stationarity audit failure; carries the offending grid point.
class AuditFailed : public Error {
 public:
  AuditFailed(const std::string& msg, Vector witness)
      : Error(msg), witness_(std::move(witness)) {}
  const Vector& witness() const { return witness_; }

 private:
  Vector witness_;
};

// ---------------------------------------------------------------------------
// Small vector helpers (named free functions; std::vector carries no algebra)

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_dim(const Vector& v, std::size_t n, const char* who) {
  if (v.size() != n)
    throw DimMismatch(std::string(who) + ": expected dimension " +
                      std::to_string(n) + ", got " + std::to_string(v.size()));
}

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimMismatch("dot: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

inline Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimMismatch("add: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimMismatch("sub: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vector scaled(const Vector& a, double s) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline double max_abs(const Vector& a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline std::string to_string(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Deterministic RNG.  mt19937_64 has a standard-pinned output sequence, and we
// map words to doubles ourselves so streams are bit-reproducible everywhere.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(gen_() % n);
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Box: closed axis-aligned product of intervals.

struct Box {
  Vector lo, hi;

  Box() = default;
  Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw DimMismatch("Box: lo/hi size mismatch");
    if (lo.empty()) throw InvalidSpec("Box: zero-dimensional");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
        throw InvalidSpec("Box: bounds must be finite");
      if (lo[i] > hi[i]) throw InvalidSpec("Box: lo > hi in coordinate " +
                                           std::to_string(i));
    }
  }

  // uniform cube [a,b]^n
  static Box cube(std::size_t n, double a, double b) {
    return Box(Vector(n, a), Vector(n, b));
  }

  std::size_t dim() const { return lo.size(); }

  bool contains(const Vector& x, double slack = 0.0) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
  }

  Vector clamp(Vector x) const {
    require_dim(x, dim(), "Box::clamp");
    for (std::size_t i = 0; i < dim(); ++i)
      x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
    return x;
  }

  double max_extent() const {
    double m = 0;
    for (std::size_t i = 0; i < dim(); ++i) m = std::max(m, hi[i] - lo[i]);
    return m;
  }
};

// ---------------------------------------------------------------------------
// DomainSpec: open/closed membership predicate plus a closed sampling box.
// Supported shapes are all convex.  The sampling box must sit inside the
// domain with at least 1e-6 of margin from any open boundary.

class DomainSpec {
 public:
  enum class Kind { all_space, positive_orthant, box, half_line };

  static DomainSpec all_space(std::size_t dim, Box sample) {
    return DomainSpec(Kind::all_space, dim, std::nullopt, false, 0.0,
                      std::move(sample));
  }

  static DomainSpec positive_orthant(std::size_t dim, Box sample) {
    return DomainSpec(Kind::positive_orthant, dim, std::nullopt, true, 0.0,
                      std::move(sample));
  }

  static DomainSpec box(Box b, bool open, Box sample) {
    std::size_t d = b.dim();
    return DomainSpec(Kind::box, d, std::move(b), open, 0.0,
                      std::move(sample));
  }

  // one-dimensional { t : t > threshold } (strict) or { t >= threshold }
  static DomainSpec half_line(double threshold, bool strict, Box sample) {
    return DomainSpec(Kind::half_line, 1, std::nullopt, strict, threshold,
                      std::move(sample));
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Box& sample_region() const { return sample_; }
  bool is_convex() const { return true; }

  bool contains(const Vector& x) const {
    if (x.size() != dim_) return false;
    switch (kind_) {
      case Kind::all_space:
        return true;
      case Kind::positive_orthant:
        for (double xi : x)
          if (!(xi > 0.0)) return false;
        return true;
      case Kind::box:
        for (std::size_t i = 0; i < dim_; ++i) {
          if (open_ ? !(x[i] > shape_->lo[i] && x[i] < shape_->hi[i])
                    : !(x[i] >= shape_->lo[i] && x[i] <= shape_->hi[i]))
            return false;
        }
        return true;
      case Kind::half_line:
        return open_ ? x[0] > threshold_ : x[0] >= threshold_;
    }
    return false;
  }

 private:
  DomainSpec(Kind k, std::size_t dim, std::optional<Box> shape, bool open,
             double threshold, Box sample)
      : kind_(k),
        dim_(dim),
        shape_(std::move(shape)),
        open_(open),
        threshold_(threshold),
        sample_(std::move(sample)) {
    if (sample_.dim() != dim_)
      throw InvalidSpec("DomainSpec: sample region dimension mismatch");
    validate_sample_margin();
  }

  // open boundaries must stay >= 1e-6 away from the sampling box
  void validate_sample_margin() const {
    constexpr double m = 1e-6;
    switch (kind_) {
      case Kind::all_space:
        return;
      case Kind::positive_orthant:
        for (std::size_t i = 0; i < dim_; ++i)
          if (sample_.lo[i] < m)
            throw InvalidSpec(
                "DomainSpec: sample region too close to orthant boundary");
        return;
      case Kind::box: {
        double need = open_ ? m : 0.0;
        for (std::size_t i = 0; i < dim_; ++i)
          if (sample_.lo[i] < shape_->lo[i] + need ||
              sample_.hi[i] > shape_->hi[i] - need)
            throw InvalidSpec(
                "DomainSpec: sample region leaves the domain box margin");
        return;
      }
      case Kind::half_line: {
        double need = open_ ? m : 0.0;
        if (sample_.lo[0] < threshold_ + need)
          throw InvalidSpec(
              "DomainSpec: sample region too close to half-line boundary");
        return;
      }
    }
  }

  Kind kind_;
  std::size_t dim_;
  std::optional<Box> shape_;  // box kind only
  bool open_ = false;         // box: open faces; orthant/half_line: strict
  double threshold_ = 0.0;    // half_line only
  Box sample_;
};

// ---------------------------------------------------------------------------
// SubgradientSet: { smooth + v : box_lo <= v <= box_hi } componentwise.
// Degenerate coordinates (lo == hi) are folded into the smooth part at
// construction, so a singleton always has an all-zero box.

class SubgradientSet {
 public:
  SubgradientSet(Vector smooth, Vector box_lo, Vector box_hi)
      : smooth_(std::move(smooth)),
        lo_(std::move(box_lo)),
        hi_(std::move(box_hi)) {
    if (smooth_.size() != lo_.size() || lo_.size() != hi_.size())
      throw DimMismatch("SubgradientSet: component size mismatch");
    if (!all_finite(smooth_) || !all_finite(lo_) || !all_finite(hi_))
      throw NonFiniteValue("SubgradientSet: non-finite component");
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (lo_[i] > hi_[i])
        throw InvalidSpec("SubgradientSet: box lo > hi in coordinate " +
                          std::to_string(i));
      if (lo_[i] == hi_[i]) {  // fold degenerate interval into smooth part
        smooth_[i] += lo_[i];
        lo_[i] = hi_[i] = 0.0;
      }
    }
  }

  static SubgradientSet singleton(Vector g) {
    std::size_t n = g.size();
    return SubgradientSet(std::move(g), zeros(n), zeros(n));
  }

  std::size_t dim() const { return smooth_.size(); }
  const Vector& smooth_part() const { return smooth_; }
  const Vector& box_lo() const { return lo_; }
  const Vector& box_hi() const { return hi_; }

  bool is_singleton() const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (lo_[i] != 0.0 || hi_[i] != 0.0) return false;
    return true;
  }

  // componentwise support bounds of the set
  Vector lower() const { return add(smooth_, lo_); }
  Vector upper() const { return add(smooth_, hi_); }

  bool contains(const Vector& g, double tol = 0.0) const {
    if (g.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (g[i] < smooth_[i] + lo_[i] - tol || g[i] > smooth_[i] + hi_[i] + tol)
        return false;
    return true;
  }

  SubgradientSet scale(double a) const {
    Vector lo = scaled(lo_, a), hi = scaled(hi_, a);
    if (a < 0) std::swap(lo, hi);
    return SubgradientSet(scaled(smooth_, a), std::move(lo), std::move(hi));
  }

  SubgradientSet minkowski_add(const SubgradientSet& o) const {
    if (o.dim() != dim()) throw DimMismatch("SubgradientSet: minkowski_add");
    return SubgradientSet(add(smooth_, o.smooth_), add(lo_, o.lo_),
                          add(hi_, o.hi_));
  }

 private:
  Vector smooth_, lo_, hi_;
};

// Extreme points of a smooth+box set: smooth part plus every corner of the
// box over its non-degenerate coordinates (2^k points).
inline std::vector<Vector> subgradient_extreme_points(const SubgradientSet& s) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < s.dim(); ++i)
    if (s.box_lo()[i] != s.box_hi()[i]) active.push_back(i);
  if (active.size() > 20)
    throw CombinatorialLimit("subgradient_extreme_points: " +
                             std::to_string(active.size()) +
                             " box coordinates exceed the 2^20 corner limit");
  std::vector<Vector> pts;
  pts.reserve(std::size_t(1) << active.size());
  for (std::size_t mask = 0; mask < (std::size_t(1) << active.size());
       ++mask) {
    Vector p = s.smooth_part();
    for (std::size_t j = 0; j < active.size(); ++j) {
      std::size_t i = active[j];
      p[i] += (mask >> j & 1) ? s.box_hi()[i] : s.box_lo()[i];
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

// Minimum-norm element.  The set is a product of intervals, so the projection
// of 0 decomposes per coordinate into a clamp.
inline Vector min_norm_subgradient(const SubgradientSet& s) {
  Vector r(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) {
    double lo = s.smooth_part()[i] + s.box_lo()[i];
    double hi = s.smooth_part()[i] + s.box_hi()[i];
    r[i] = std::min(std::max(0.0, lo), hi);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dense matrix, just big enough for Jacobian-transform kernels.

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols)
      throw DimMismatch("Matrix: data size does not match rows*cols");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  Vector apply(const Vector& x) const {
    if (x.size() != cols) throw DimMismatch("Matrix::apply");
    Vector y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  Matrix multiply(const Matrix& o) const {
    if (cols != o.rows) throw DimMismatch("Matrix::multiply");
    Matrix r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k)
        for (std::size_t j = 0; j < o.cols; ++j)
          r(i, j) += (*this)(i, k) * o(k, j);
    return r;
  }

  Matrix transpose() const {
    Matrix r(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  bool is_diagonal(double tol = 0.0) const {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (i != j && std::abs((*this)(i, j)) > tol) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Kernel functions.  A kernel eta(x, y) comes in one of five forms; the first
// four carry a structural identity so that "same kernel" is decidable without
// comparing closures.

using EvalFn = std::function<double(const Vector&)>;
using SubdiffFn = std::function<SubgradientSet(const Vector&)>;
using ScalarPairFn = std::function<double(const Vector&, const Vector&)>;
using VectorPairFn = std::function<Vector(const Vector&, const Vector&)>;
using MapFn = std::function<Vector(const Vector&)>;
using MatrixFn = std::function<Matrix(const Vector&)>;

// Structural identity of a kernel rule: a name (which may embed the
// descriptor of the function the rule was derived from) plus numeric
// parameters.  Two rules are the same iff their ids compare equal.
struct RuleId {
  std::string name;
  std::vector<double> params;

  bool operator==(const RuleId&) const = default;

  std::string to_string() const {
    std::string s = name;
    if (!params.empty()) {
      s += "[";
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ",";
        s += format_double(params[i]);
      }
      s += "]";
    }
    return s;
  }
};

class KernelFn {
 public:
  enum class Form {
    scaled_difference,   // eta(x,y) = alpha(x,y) * (y - x)
    componentwise,       // eta_i(x,y) = eta_i(x_i, y_i), scalar parts
    jacobian_transform,  // eta(x,y) = JacInv(x) * (Phi(y) - Phi(x))
    canonical,           // built from an owner function's values/subgradients
    explicit_rule,       // arbitrary closed-form eta
  };
  enum class CanonicalVariant { smooth, nonsmooth };

  static KernelFn scaled_difference(RuleId id, ScalarPairFn alpha) {
    KernelFn k(Form::scaled_difference);
    k.id_ = std::move(id);
    k.alpha_ = std::move(alpha);
    return k;
  }

  static KernelFn componentwise(std::vector<KernelFn> parts) {
    if (parts.empty()) throw InvalidSpec("KernelFn: empty componentwise kernel");
    KernelFn k(Form::componentwise);
    k.parts_ = std::make_shared<std::vector<KernelFn>>(std::move(parts));
    return k;
  }

  static KernelFn jacobian_transform(RuleId id, MapFn phi, MatrixFn jac_inv) {
    KernelFn k(Form::jacobian_transform);
    k.id_ = std::move(id);
    k.phi_ = std::move(phi);
    k.jac_inv_ = std::move(jac_inv);
    return k;
  }

  // owner_uid ties the kernel to the function object it was derived from;
  // stationarity inside the kernel is decided at ||xi|| <= 1e-10.
  static KernelFn canonical(std::uint64_t owner_uid, CanonicalVariant v,
                            EvalFn eval, SubdiffFn subdiff) {
    KernelFn k(Form::canonical);
    k.id_ = RuleId{"canonical#" + std::to_string(owner_uid),
                   {v == CanonicalVariant::smooth ? 0.0 : 1.0}};
    k.variant_ = v;
    k.owner_eval_ = std::move(eval);
    k.owner_subdiff_ = std::move(subdiff);
    return k;
  }

  static KernelFn explicit_rule(RuleId id, VectorPairFn eta) {
    KernelFn k(Form::explicit_rule);
    k.id_ = std::move(id);
    k.eta_ = std::move(eta);
    return k;
  }

  Form form() const { return form_; }
  const RuleId& id() const { return id_; }
  CanonicalVariant canonical_variant() const { return variant_; }

  const std::vector<KernelFn>& components() const {
    if (form_ != Form::componentwise)
      throw InvalidSpec("KernelFn: not a componentwise kernel");
    return *parts_;
  }

  double alpha(const Vector& x, const Vector& y) const {
    if (form_ != Form::scaled_difference)
      throw NotScaledDifference("KernelFn: alpha() on non-scaled-difference form");
    return alpha_(x, y);
  }

  // Domain attached for evaluation-time membership checks (optional).
  KernelFn with_domain(std::shared_ptr<const DomainSpec> d) const {
    KernelFn k = *this;
    k.domain_ = std::move(d);
    return k;
  }
  const std::shared_ptr<const DomainSpec>& attached_domain() const {
    return domain_;
  }

  // Structural equality: same form and same rule identity (componentwise:
  // recursively equal parts).
  bool structurally_equal(const KernelFn& o) const {
    if (form_ != o.form_) return false;
    if (form_ == Form::componentwise) {
      if (parts_->size() != o.parts_->size()) return false;
      for (std::size_t i = 0; i < parts_->size(); ++i)
        if (!(*parts_)[i].structurally_equal((*o.parts_)[i])) return false;
      return true;
    }
    return id_ == o.id_;
  }

  friend Vector kernel_eval(const KernelFn& k, const Vector& x,
                            const Vector& y);

 private:
  explicit KernelFn(Form f) : form_(f) {}

  Form form_;
  RuleId id_;
  ScalarPairFn alpha_;                             // scaled_difference
  std::shared_ptr<std::vector<KernelFn>> parts_;   // componentwise
  MapFn phi_;                                      // jacobian_transform
  MatrixFn jac_inv_;                               // jacobian_transform
  CanonicalVariant variant_ = CanonicalVariant::smooth;  // canonical
  EvalFn owner_eval_;                              // canonical
  SubdiffFn owner_subdiff_;                        // canonical
  VectorPairFn eta_;                               // explicit_rule
  std::shared_ptr<const DomainSpec> domain_;
};

inline Vector kernel_eval(const KernelFn& k, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimMismatch("kernel_eval: x/y size mismatch");
  if (k.domain_) {
    if (!k.domain_->contains(x))
      throw DomainError("kernel_eval: x outside kernel domain " + to_string(x));
    if (!k.domain_->contains(y))
      throw DomainError("kernel_eval: y outside kernel domain " + to_string(y));
  }
  Vector eta;
  switch (k.form_) {
    case KernelFn::Form::scaled_difference:
      eta = scaled(sub(y, x), k.alpha_(x, y));
      break;
    case KernelFn::Form::componentwise: {
      if (x.size() != k.parts_->size())
        throw DimMismatch("kernel_eval: componentwise dimension mismatch");
      eta.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        Vector e = kernel_eval((*k.parts_)[i], Vector{x[i]}, Vector{y[i]});
        eta[i] = e[0];
      }
      break;
    }
    case KernelFn::Form::jacobian_transform: {
      Vector d = sub(k.phi_(y), k.phi_(x));
      eta = k.jac_inv_(x).apply(d);
      break;
    }
    case KernelFn::Form::canonical: {
      Vector xi = min_norm_subgradient(k.owner_subdiff_(x));
      double n2 = dot(xi, xi);
      if (std::sqrt(n2) <= 1e-10) {
        eta = zeros(x.size());
        break;
      }
      double df = k.owner_eval_(y) - k.owner_eval_(x);
      double c = (k.variant_ == KernelFn::CanonicalVariant::smooth)
                     ? df / n2
                     : -std::abs(df) / n2;
      eta = scaled(xi, c);
      break;
    }
    case KernelFn::Form::explicit_rule:
      eta = k.eta_(x, y);
      break;
  }
  if (!all_finite(eta))
    throw NonFiniteValue("kernel_eval: non-finite kernel value at x=" +
                         to_string(x) + ", y=" + to_string(y));
  return eta;
}

// ---------------------------------------------------------------------------
// Construction provenance of a function object, named by how the object was
// built.

enum class Provenance {
  raw,                  // user-supplied eval/subdiff, no certificate
  convex_atom,          // convex catalog atom (kernel alpha == 1)
  transform_composite,  // convex g composed with an invertible map
  fractional_quotient,  // nonnegative-convex over positive-concave quotient
  concave_composite,    // increasing concave scalar map of convex g
  separable_sum,        // sum of certified one-dimensional parts
  weighted_sum,         // nonnegative combination under a shared kernel
  stationarity_audit,   // certified by a grid audit around a known minimum
  no_stationary_audit,  // certified by a grid audit with no stationary point
};

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::raw: return "raw";
    case Provenance::convex_atom: return "convex_atom";
    case Provenance::transform_composite: return "transform_composite";
    case Provenance::fractional_quotient: return "fractional_quotient";
    case Provenance::concave_composite: return "concave_composite";
    case Provenance::separable_sum: return "separable_sum";
    case Provenance::weighted_sum: return "weighted_sum";
    case Provenance::stationarity_audit: return "stationarity_audit";
    case Provenance::no_stationary_audit: return "no_stationary_audit";
  }
  return "?";
}

// Record of a completed grid audit (see algebra.hpp).
struct AuditCertificate {
  Box region;
  long grid_points = 0;
  double floor = 0.0;              // minimum subgradient norm away from the min
  double exclusion_radius = 0.0;   // ball around known_min exempt from the floor
  std::optional<Vector> known_min; // absent for a no-stationary-point audit
};

// ---------------------------------------------------------------------------
// FunctionObject: eval + subdiff + domain + optional kernel and certificates.
// Immutable; copies share the identity (uid) of the original, so kernels
// derived from a function stay tied to it across copies.

namespace detail {
inline std::uint64_t next_uid() {
  static std::atomic<std::uint64_t> c{1};
  return c.fetch_add(1);
}
}  // namespace detail

class FunctionObject {
 public:
  struct Init {
    std::string descriptor;  // structural identity, e.g. "frac(abs(1),affine(1,0))"
    EvalFn eval;
    SubdiffFn subdiff;
    DomainSpec domain = DomainSpec::all_space(1, Box(Vector{-1.0}, Vector{1.0}));
    std::optional<KernelFn> kernel;
    Provenance provenance = Provenance::raw;
    // kink_loci[i] lists the i-th coordinate values where the subdifferential
    // switches to its interval form (within 1e-12)
    std::vector<std::vector<double>> kink_loci;
    bool convex_certified = false;
    bool concave_certified = false;
    bool invex_certified = false;
    std::optional<AuditCertificate> audit;
  };

  explicit FunctionObject(Init init)
      : uid_(detail::next_uid()),
        descriptor_(std::move(init.descriptor)),
        eval_(std::move(init.eval)),
        subdiff_(std::move(init.subdiff)),
        domain_(std::move(init.domain)),
        kernel_(std::move(init.kernel)),
        provenance_(init.provenance),
        kink_loci_(std::move(init.kink_loci)),
        convex_certified_(init.convex_certified),
        concave_certified_(init.concave_certified),
        invex_certified_(init.invex_certified),
        audit_(std::move(init.audit)) {
    if (!eval_ || !subdiff_) throw InvalidSpec("FunctionObject: missing eval/subdiff");
    if (descriptor_.empty()) throw InvalidSpec("FunctionObject: empty descriptor");
    if (kink_loci_.empty()) kink_loci_.resize(domain_.dim());
    if (kink_loci_.size() != domain_.dim())
      throw DimMismatch("FunctionObject: kink loci per coordinate");
  }

  std::uint64_t uid() const { return uid_; }
  const std::string& descriptor() const { return descriptor_; }
  const DomainSpec& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim(); }
  const std::optional<KernelFn>& kernel() const { return kernel_; }
  Provenance provenance() const { return provenance_; }
  const std::vector<std::vector<double>>& kink_loci() const { return kink_loci_; }
  bool convex_certified() const { return convex_certified_; }
  bool concave_certified() const { return concave_certified_; }
  bool invex_certified() const { return invex_certified_; }
  const std::optional<AuditCertificate>& audit() const { return audit_; }

  double value(const Vector& x) const {
    check_point(x, "value");
    double v = eval_(x);
    if (!std::isfinite(v))
      throw NonFiniteValue(descriptor_ + ": non-finite value at " + to_string(x));
    return v;
  }

  SubgradientSet subgradient(const Vector& x) const {
    check_point(x, "subgradient");
    SubgradientSet s = subdiff_(x);
    if (s.dim() != dim())
      throw DimMismatch(descriptor_ + ": subgradient dimension mismatch");
    return s;
  }

  // raw closures, for deriving canonical kernels without ownership cycles
  const EvalFn& eval_fn() const { return eval_; }
  const SubdiffFn& subdiff_fn() const { return subdiff_; }

  bool near_kink(const Vector& x, double tol) const {
    for (std::size_t i = 0; i < kink_loci_.size() && i < x.size(); ++i)
      for (double locus : kink_loci_[i])
        if (std::abs(x[i] - locus) <= tol) return true;
    return false;
  }

  // derived copy with a (different) kernel attached; keeps this object's uid
  FunctionObject with_kernel(KernelFn k) const {
    FunctionObject f = *this;
    f.kernel_ = std::move(k);
    return f;
  }

  // derived copy marked certified, with provenance and audit trail
  FunctionObject certified(Provenance p, KernelFn k,
                           std::optional<AuditCertificate> cert) const {
    FunctionObject f = *this;
    f.kernel_ = std::move(k);
    f.provenance_ = p;
    f.invex_certified_ = true;
    f.audit_ = std::move(cert);
    return f;
  }

 private:
  void check_point(const Vector& x, const char* who) const {
    require_dim(x, dim(), descriptor_.c_str());
    if (!all_finite(x))
      throw NonFiniteValue(descriptor_ + std::string("::") + who +
                           ": non-finite input");
    if (!domain_.contains(x))
      throw DomainError(descriptor_ + std::string("::") + who + ": " +
                        to_string(x) + " outside domain");
  }

  std::uint64_t uid_;
  std::string descriptor_;
  EvalFn eval_;
  SubdiffFn subdiff_;
  DomainSpec domain_;
  std::optional<KernelFn> kernel_;
  Provenance provenance_;
  std::vector<std::vector<double>> kink_loci_;
  bool convex_certified_;
  bool concave_certified_;
  bool invex_certified_;
  std::optional<AuditCertificate> audit_;
};

// ---------------------------------------------------------------------------
// CheckReport: outcome of one numerical property check.  passed is always
// worst_violation <= tolerance; a witness is recorded exactly when the check
// fails.

struct Witness {
  Vector x;
  Vector y;   // empty for single-point properties
  Vector xi;  // subgradient involved, empty if not applicable
};

struct CheckReport {
  std::string property;
  bool passed = false;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  long samples = 0;        // pairs or points examined
  long skipped_kinks = 0;  // points skipped by smoothness-only checks
  long work = 0;           // deterministic count of inequality evaluations
  std::uint64_t rng_seed = 0;
  std::optional<Witness> witness;
  std::string note;
};

namespace detail {
// Assemble a report enforcing the passed/witness invariants.
inline CheckReport finish_report(std::string property, double tol,
                                 std::uint64_t seed, long samples, long work,
                                 double worst, std::optional<Witness> witness,
                                 long skipped = 0, std::string note = {}) {
  CheckReport r;
  r.property = std::move(property);
  r.tolerance = tol;
  r.rng_seed = seed;
  r.samples = samples;
  r.work = work;
  r.worst_violation = worst;
  r.skipped_kinks = skipped;
  r.passed = worst <= tol;
  if (!r.passed) r.witness = std::move(witness);
  r.note = std::move(note);
  return r;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// ConstrainedProblem: minimize objective subject to constraints g_i <= 0.
// If common_kernel is set, every function listed shares that kernel
// structurally (checked here), which upgrades KKT points to global minima.

struct ConstrainedProblem {
  FunctionObject objective;
  std::vector<FunctionObject> constraints;
  std::optional<KernelFn> common_kernel;

  ConstrainedProblem(FunctionObject obj, std::vector<FunctionObject> cons,
                     std::optional<KernelFn> shared = std::nullopt)
      : objective(std::move(obj)),
        constraints(std::move(cons)),
        common_kernel(std::move(shared)) {
    for (const auto& c : constraints)
      if (c.dim() != objective.dim())
        throw DimMismatch("ConstrainedProblem: constraint dimension mismatch");
    if (common_kernel) {
      auto check = [&](const FunctionObject& f) {
        if (!f.kernel())
          throw MissingKernel("ConstrainedProblem: " + f.descriptor() +
                              " has no kernel to share");
        if (!f.kernel()->structurally_equal(*common_kernel))
          throw KernelMismatch("ConstrainedProblem: " + f.descriptor() +
                               " does not share the common kernel");
      };
      check(objective);
      for (const auto& c : constraints) check(c);
    }
  }
};

}  // namespace invexkit
