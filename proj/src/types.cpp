#include "rwrp/types.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rwrp {

std::string format_vec(const IntVec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string format_vec(const RatVec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += v[i].str();
  }
  return s;
}

std::string format_vec(const RealVec& v) {
  std::string s;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    s += buf;
  }
  return s;
}

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  if (text.empty()) throw SchemaError("empty number");
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      Rational num = parse_rational(text.substr(0, slash)), den = parse_rational(text.substr(slash + 1));
      if (denominator(num) != 1 || denominator(den) != 1) throw SchemaError("bad fraction '" + raw + "'");
      if (den == 0) throw SchemaError("zero denominator in '" + raw + "'");
      return num / den;
    }
    auto dot_pos = text.find('.');
    auto exp_pos = text.find_first_of("eE");
    std::string mant = exp_pos == std::string::npos ? text : text.substr(0, exp_pos);
    long exp10 = exp_pos == std::string::npos ? 0 : std::stol(text.substr(exp_pos + 1));
    if (dot_pos != std::string::npos && dot_pos < mant.size()) {
      exp10 -= static_cast<long>(mant.size() - dot_pos - 1);
      mant.erase(dot_pos, 1);
    }
    if (mant.empty() || mant == "-" || mant == "+") throw SchemaError("bad number '" + raw + "'");
    bool neg = false;
    if (mant[0] == '+' || mant[0] == '-') {
      neg = mant[0] == '-';
      mant.erase(0, 1);
    }
    // a leading 0 would select octal
    auto first = mant.find_first_not_of('0');
    mant = first == std::string::npos ? "0" : mant.substr(first);
    if (mant.find_first_not_of("0123456789") != std::string::npos) throw SchemaError("bad number '" + raw + "'");
    Integer m(mant);
    if (neg) m = -m;
    Integer p = 1;
    for (long i = 0; i < std::labs(exp10); ++i) p *= 10;
    return exp10 >= 0 ? Rational(m * p) : Rational(m, p);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw SchemaError("bad number '" + raw + "'");
  }
}

RatVec parse_rational_vec(const std::string& text) {
  RatVec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw SchemaError("empty vector '" + text + "'");
  return out;
}

IntVec parse_int_vec(const std::string& text) {
  IntVec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw SchemaError("bad integer '" + item + "'");
    } catch (const SchemaError&) {
      throw;
    } catch (const std::exception&) {
      throw SchemaError("bad integer '" + item + "'");
    }
  }
  if (out.empty()) throw SchemaError("empty vector '" + text + "'");
  return out;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no rational form");
  int e = 0;
  double m = std::frexp(x, &e);
  // m * 2^53 is an exact integer
  auto mi = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rational r{Integer(mi)};
  Integer two_pow = 1;
  for (int i = 0; i < std::abs(e); ++i) two_pow *= 2;
  return e >= 0 ? r * two_pow : r / two_pow;
}

}  // namespace rwrp
