#pragma once

// Scalar comparison functions (classes P, PD, K, K-infinity) with composition,
// numeric inversion, grid-based class verification and small-gain checking.
// Curves are plain callables with a declared class tag; class membership is
// verified by sampling, not symbolically.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spkit {

enum class CurveClass { Unspecified = 0, P = 1, PD = 2, K = 3, KInf = 4 };

inline std::string_view curve_class_name(CurveClass c) {
  switch (c) {
    case CurveClass::P: return "P";
    case CurveClass::PD: return "PD";
    case CurveClass::K: return "K";
    case CurveClass::KInf: return "Kinf";
    default: return "unspecified";
  }
}

struct Interval {
  double lo = 1e-6;
  double hi = 1e6;
};

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonMonotoneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

// A scalar monotone map on the nonnegative reals with a declared class tag.
// Immutable after construction; evaluation is reentrant.
class ComparisonCurve {
 public:
  ComparisonCurve() = default;
  ComparisonCurve(std::function<double(double)> eval, CurveClass tag,
                  Interval domain_hint = {}, std::string name = "curve")
      : eval_(std::move(eval)),
        tag_(tag),
        domain_(domain_hint),
        name_(std::move(name)) {}

  double operator()(double r) const {
    if (!eval_) throw EvaluationError("curve '" + name_ + "' has no callable");
    if (!(r >= 0.0))
      throw EvaluationError("curve '" + name_ + "' evaluated at negative r = " +
                            detail::num_str(r));
    const double v = eval_(r);
    if (!std::isfinite(v) || v < 0.0)
      throw EvaluationError("curve '" + name_ + "' produced invalid value " +
                            detail::num_str(v) + " at r = " + detail::num_str(r));
    return v;
  }

  CurveClass tag() const { return tag_; }
  const Interval& domain_hint() const { return domain_; }
  const std::string& name() const { return name_; }
  bool valid() const { return static_cast<bool>(eval_); }

 private:
  std::function<double(double)> eval_;
  CurveClass tag_ = CurveClass::Unspecified;
  Interval domain_;
  std::string name_ = "curve";
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("log_grid requires 0 < lo < hi and count >= 2");
  std::vector<double> g(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

// Default verification grid: 200 log-spaced points on [1e-6, 1e6].
inline const std::vector<double>& default_grid() {
  static const std::vector<double> g = log_grid(1e-6, 1e6, 200);
  return g;
}

// Composition outer(inner(r)). The result's tag is the weakest guarantee the
// two tags support: K/Kinf chains keep their order, a PD link degrades the
// chain to PD, a P link (which may not vanish at zero) degrades it to P.
inline ComparisonCurve compose(const ComparisonCurve& outer,
                               const ComparisonCurve& inner) {
  CurveClass tag;
  const CurveClass a = outer.tag(), b = inner.tag();
  if (a == CurveClass::Unspecified || b == CurveClass::Unspecified)
    tag = CurveClass::Unspecified;
  else if (a == CurveClass::P || b == CurveClass::P)
    tag = CurveClass::P;
  else
    tag = static_cast<int>(a) < static_cast<int>(b) ? a : b;
  return ComparisonCurve(
      [outer, inner](double r) { return outer(inner(r)); }, tag,
      inner.domain_hint(), outer.name() + "∘" + inner.name());
}

struct InvertOptions {
  double rtol = 1e-12;
  double y_floor = 1e-300;
  int max_expansions = 60;
  int max_bisections = 200;
};

// Solves curve(r) = y by bisection for a curve that is increasing on the
// bracket. The upper end of the bracket is doubled until it encloses y.
inline double invert_numeric(const ComparisonCurve& curve, double y,
                             Interval bracket = {0.0, 1.0},
                             InvertOptions opt = {}) {
  if (!std::isfinite(y) || y < 0.0)
    throw EvaluationError("invert_numeric: target must be finite and >= 0");
  const double tol = opt.rtol * std::max(y, opt.y_floor);
  double lo = std::max(0.0, bracket.lo);
  double hi = bracket.hi;
  if (!(hi > lo)) hi = lo > 0.0 ? 2.0 * lo : 1.0;
  double f_lo = curve(lo);
  if (std::abs(f_lo - y) <= tol) return lo;
  if (f_lo > y)
    throw BracketError("invert_numeric: curve '" + curve.name() + "'(" +
                       detail::num_str(lo) + ") = " + detail::num_str(f_lo) +
                       " already exceeds target " + detail::num_str(y));
  double f_hi = curve(hi);
  for (int k = 0; f_hi < y && k < opt.max_expansions; ++k) {
    if (f_hi < f_lo)
      throw NonMonotoneError("invert_numeric: curve '" + curve.name() +
                             "' decreased during bracket expansion");
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = curve(hi);
  }
  if (f_hi < y)
    throw BracketError(
        "invert_numeric: bracket expansion failed to enclose target " +
        detail::num_str(y) + " for curve '" + curve.name() +
        "' (last value " + detail::num_str(f_hi) + " at r = " +
        detail::num_str(hi) + "); curve may not be of class Kinf");
  if (std::abs(f_hi - y) <= tol) return hi;

  // Bracketed root refinement by the Illinois variant of regula falsi, with
  // a midpoint fallback; interior samples outside the bracket's value range
  // expose a non-monotone curve.
  const double range_lo = f_lo, range_hi = f_hi;
  const double slack = 1e-12 * (std::abs(range_lo) + std::abs(range_hi)) + 1e-300;
  double ra = f_lo - y, rb = f_hi - y;  // residuals; Illinois may rescale
  double best_r = hi, best_err = std::abs(f_hi - y);
  if (std::abs(f_lo - y) < best_err) {
    best_r = lo;
    best_err = std::abs(f_lo - y);
  }
  int last_side = 0;
  for (int it = 0; it < opt.max_bisections; ++it) {
    double mid = (lo * rb - hi * ra) / (rb - ra);
    if (!std::isfinite(mid) || !(mid > lo) || !(mid < hi))
      mid = 0.5 * (lo + hi);
    if (!(mid > lo) || !(mid < hi)) break;  // interval exhausted in doubles
    const double f_mid = curve(mid);
    if (f_mid < range_lo - slack || f_mid > range_hi + slack)
      throw NonMonotoneError("invert_numeric: non-monotone samples for curve '" +
                             curve.name() + "' near r = " + detail::num_str(mid));
    const double err = std::abs(f_mid - y);
    if (err < best_err) {
      best_err = err;
      best_r = mid;
    }
    if (err <= tol) return mid;
    if (f_mid < y) {
      lo = mid;
      ra = f_mid - y;
      if (last_side == -1) rb *= 0.5;
      last_side = -1;
    } else {
      hi = mid;
      rb = f_mid - y;
      if (last_side == 1) ra *= 0.5;
      last_side = 1;
    }
  }
  return best_r;
}

// Curve view of the numeric inverse.
inline ComparisonCurve inverse_curve(const ComparisonCurve& curve) {
  return ComparisonCurve(
      [curve](double r) {
        return r == 0.0 ? 0.0
                        : invert_numeric(curve, r, {0.0, std::max(1.0, r)});
      },
      curve.tag(), curve.domain_hint(), curve.name() + "⁻¹");
}

struct SmallGainReport {
  bool pass = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_r = 0.0;
  std::size_t points = 0;
};

// Checks gamma_1(gamma_2(r)) < r on the grid with relative margin at least
// margin_min. A failure is a normal report, not an error.
inline SmallGainReport check_small_gain(const ComparisonCurve& gamma_1,
                                        const ComparisonCurve& gamma_2,
                                        const std::vector<double>& grid,
                                        double margin_min = 1e-9) {
  if (gamma_1.tag() != CurveClass::KInf || gamma_2.tag() != CurveClass::KInf)
    throw std::invalid_argument(
        "check_small_gain: both curves must carry class tag Kinf");
  if (grid.empty())
    throw std::invalid_argument("check_small_gain: empty grid");
  SmallGainReport rep;
  rep.points = grid.size();
  for (double r : grid) {
    if (!(r > 0.0))
      throw std::invalid_argument("check_small_gain: grid must be positive");
    const double margin = (r - gamma_1(gamma_2(r))) / r;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_r = r;
    }
  }
  rep.pass = rep.worst_margin >= margin_min;
  return rep;
}

// Builds sigma(r) = sqrt(gamma_s(r) * gamma_f^{-1}(r)), the pointwise
// geometric mean of the two bounds it must stay strictly between.
// Precondition: the loop gain gamma_f∘gamma_s is a strict contraction on the
// grid (this guarantees gamma_s < gamma_f^{-1} pointwise).
inline ComparisonCurve construct_sigma(const ComparisonCurve& gamma_s,
                                       const ComparisonCurve& gamma_f,
                                       const std::vector<double>& grid) {
  const SmallGainReport sg = check_small_gain(gamma_f, gamma_s, grid);
  if (!sg.pass)
    throw PreconditionError(
        "construct_sigma: small-gain condition fails (worst margin " +
        detail::num_str(sg.worst_margin) + " at r = " +
        detail::num_str(sg.worst_r) + ")");
  ComparisonCurve sigma(
      [gamma_s, gamma_f](double r) {
        if (r == 0.0) return 0.0;
        const double ginv = invert_numeric(gamma_f, r, {0.0, std::max(1.0, r)});
        return std::sqrt(gamma_s(r) * ginv);
      },
      CurveClass::KInf, gamma_s.domain_hint(), "sigma");
  for (double r : grid) {
    const double lo = gamma_s(r);
    const double hi = invert_numeric(gamma_f, r, {0.0, std::max(1.0, r)});
    const double s = sigma(r);
    if (!(lo < s && s < hi))
      throw PreconditionError("construct_sigma: output escapes its bounds at r = " +
                              detail::num_str(r));
  }
  return sigma;
}

struct ClassCheckReport {
  bool pass = true;
  std::string detail;
};

// Grid-based membership check for the declared class tag: strict growth and a
// zero at zero for K/Kinf, positivity for P/PD.
inline ClassCheckReport verify_class(const ComparisonCurve& curve,
                                     std::size_t points = 200) {
  ClassCheckReport rep;
  const auto fail = [&rep](std::string msg) {
    rep.pass = false;
    rep.detail = std::move(msg);
    return rep;
  };
  const Interval dom = curve.domain_hint();
  std::vector<double> grid;
  try {
    grid = log_grid(dom.lo, dom.hi, points);
    const CurveClass tag = curve.tag();
    if (tag == CurveClass::K || tag == CurveClass::KInf ||
        tag == CurveClass::PD) {
      if (curve(0.0) > 1e-15)
        return fail("value at r = 0 is " + detail::num_str(curve(0.0)));
    }
    double prev = -1.0;
    for (double r : grid) {
      const double v = curve(r);
      switch (tag) {
        case CurveClass::K:
        case CurveClass::KInf:
          if (prev >= 0.0 && !(v > prev))
            return fail("not strictly increasing near r = " +
                        detail::num_str(r));
          break;
        case CurveClass::PD:
        case CurveClass::P:
          if (!(v > 0.0))
            return fail("not positive at r = " + detail::num_str(r));
          break;
        default:
          break;
      }
      prev = v;
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return rep;
}

}  // namespace spkit
