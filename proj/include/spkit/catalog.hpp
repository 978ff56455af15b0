#pragma once

// Named parametric curve catalog used by scenario configuration files.
// Grammar accepted by parse_curve:
//   expr      := term ('+' term)*
//   term      := name | name '(' number (',' number)* ')'
//   name      := identity | linear | power | saturation | constant
// Examples: "linear(4)", "power(0.99, 1.5)", "power(1,0.5) + linear(2)".

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "spkit/comparison.hpp"

namespace spkit {

inline ComparisonCurve identity_curve() {
  return ComparisonCurve([](double r) { return r; }, CurveClass::KInf, {},
                         "identity");
}

inline ComparisonCurve linear_curve(double k) {
  if (!(k > 0.0))
    throw std::invalid_argument("linear_curve: slope must be positive");
  return ComparisonCurve([k](double r) { return k * r; }, CurveClass::KInf, {},
                         "linear(" + detail::num_str(k) + ")");
}

inline ComparisonCurve power_curve(double k, double p) {
  if (!(k > 0.0) || !(p > 0.0))
    throw std::invalid_argument(
        "power_curve: coefficient and exponent must be positive");
  return ComparisonCurve([k, p](double r) { return k * std::pow(r, p); },
                         CurveClass::KInf, {},
                         "power(" + detail::num_str(k) + "," +
                             detail::num_str(p) + ")");
}

// min(1, r): strictly increasing only below the plateau, hence tagged PD.
inline ComparisonCurve saturation_curve() {
  return ComparisonCurve([](double r) { return std::min(1.0, r); },
                         CurveClass::PD, {}, "saturation");
}

inline ComparisonCurve constant_curve(double c) {
  if (!(c > 0.0))
    throw std::invalid_argument("constant_curve: value must be positive");
  return ComparisonCurve([c](double) { return c; }, CurveClass::P, {},
                         "constant(" + detail::num_str(c) + ")");
}

inline ComparisonCurve sum_curve(const ComparisonCurve& a,
                                 const ComparisonCurve& b) {
  const CurveClass ta = a.tag(), tb = b.tag();
  CurveClass tag;
  if (ta == CurveClass::Unspecified || tb == CurveClass::Unspecified)
    tag = CurveClass::Unspecified;
  else if ((ta == CurveClass::K || ta == CurveClass::KInf) &&
           (tb == CurveClass::K || tb == CurveClass::KInf))
    tag = static_cast<int>(ta) > static_cast<int>(tb) ? ta : tb;
  else
    tag = static_cast<int>(ta) < static_cast<int>(tb) ? ta : tb;
  return ComparisonCurve([a, b](double r) { return a(r) + b(r); }, tag,
                         a.domain_hint(), a.name() + "+" + b.name());
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view s) {
  s = trim(s);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(std::string(s), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("curve spec: bad number '" + std::string(s) +
                                "'");
  }
  if (used != s.size())
    throw std::invalid_argument("curve spec: bad number '" + std::string(s) +
                                "'");
  return v;
}

inline ComparisonCurve parse_term(std::string_view term) {
  term = trim(term);
  std::string name;
  std::vector<double> args;
  const auto paren = term.find('(');
  if (paren == std::string_view::npos) {
    name = std::string(term);
  } else {
    if (term.back() != ')')
      throw std::invalid_argument("curve spec: missing ')' in '" +
                                  std::string(term) + "'");
    name = std::string(trim(term.substr(0, paren)));
    std::string_view inside = term.substr(paren + 1, term.size() - paren - 2);
    inside = trim(inside);
    while (!inside.empty()) {
      const auto comma = inside.find(',');
      args.push_back(parse_number(inside.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      inside.remove_prefix(comma + 1);
    }
  }
  const auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw std::invalid_argument("curve spec: '" + name + "' takes " +
                                  std::to_string(k) + " parameter(s)");
  };
  if (name == "identity" || name == "id") {
    want(0);
    return identity_curve();
  }
  if (name == "linear") {
    want(1);
    return linear_curve(args[0]);
  }
  if (name == "power") {
    want(2);
    return power_curve(args[0], args[1]);
  }
  if (name == "saturation" || name == "sat") {
    want(0);
    return saturation_curve();
  }
  if (name == "constant") {
    want(1);
    return constant_curve(args[0]);
  }
  throw std::invalid_argument("curve spec: unknown curve '" + name + "'");
}

}  // namespace detail

inline ComparisonCurve parse_curve(std::string_view spec) {
  spec = detail::trim(spec);
  if (spec.empty()) throw std::invalid_argument("curve spec: empty");
  ComparisonCurve result;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= spec.size(); ++i) {
    if (i < spec.size() && spec[i] == '(') ++depth;
    if (i < spec.size() && spec[i] == ')') --depth;
    if (i == spec.size() || (spec[i] == '+' && depth == 0)) {
      const ComparisonCurve term = detail::parse_term(spec.substr(start, i - start));
      result = result.valid() ? sum_curve(result, term) : term;
      start = i + 1;
    }
  }
  return result;
}

}  // namespace spkit
