#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwrp {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

using IntVec = std::vector<std::int64_t>;
using RatVec = std::vector<Rational>;
using RealVec = std::vector<double>;

// Error hierarchy. Each failure mode named by the operation contracts has its
// own type so callers (and tests) can tell them apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RWRP_DEFINE_ERROR(Name)         \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

RWRP_DEFINE_ERROR(SchemaError);
RWRP_DEFINE_ERROR(UnsupportedDimension);
RWRP_DEFINE_ERROR(NotInCone);
RWRP_DEFINE_ERROR(NotRepresentable);
RWRP_DEFINE_ERROR(DegenerateInput);
RWRP_DEFINE_ERROR(SearchCapExceeded);
RWRP_DEFINE_ERROR(CapacityError);
RWRP_DEFINE_ERROR(OutOfBox);
RWRP_DEFINE_ERROR(Unreachable);
RWRP_DEFINE_ERROR(TruncationError);
RWRP_DEFINE_ERROR(IterationLimit);
RWRP_DEFINE_ERROR(AssumptionViolation);
RWRP_DEFINE_ERROR(Unsupported);
RWRP_DEFINE_ERROR(DivergentSeries);
RWRP_DEFINE_ERROR(BudgetExceeded);
RWRP_DEFINE_ERROR(DomainError);
RWRP_DEFINE_ERROR(EmptyBand);
RWRP_DEFINE_ERROR(NotFeasible);

#undef RWRP_DEFINE_ERROR

inline RatVec to_rational(const IntVec& v) {
  RatVec out;
  out.reserve(v.size());
  for (auto x : v) out.emplace_back(x);
  return out;
}

inline RealVec to_real(const RatVec& v) {
  RealVec out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.convert_to<double>());
  return out;
}

inline RealVec to_real(const IntVec& v) { return RealVec(v.begin(), v.end()); }

inline std::int64_t l1_norm(const IntVec& v) {
  std::int64_t s = 0;
  for (auto x : v) s += x < 0 ? -x : x;
  return s;
}

inline Rational l1_norm(const RatVec& v) {
  Rational s = 0;
  for (const auto& x : v) s += abs(x);
  return s;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const RealVec& a, const IntVec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * static_cast<double>(b[i]);
  return s;
}

inline IntVec add(const IntVec& a, const IntVec& b) {
  IntVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

inline IntVec sub(const IntVec& a, const IntVec& b) {
  IntVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

inline IntVec scale(const IntVec& a, std::int64_t s) {
  IntVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * s;
  return c;
}

// "1 -2 3"; used for CSV cells and messages.
std::string format_vec(const IntVec& v);
std::string format_vec(const RatVec& v);
std::string format_vec(const RealVec& v);

// Parses "1/2,1/2" or "0.25,3" into exact rationals (decimals are exact).
RatVec parse_rational_vec(const std::string& text);
IntVec parse_int_vec(const std::string& text);
Rational parse_rational(const std::string& text);

// Exact rational value of a finite double.
Rational rational_from_double(double x);

}  // namespace rwrp
