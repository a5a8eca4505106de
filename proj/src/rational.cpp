#include "monolab/rational.hpp"

#include <stdexcept>

#include "monolab/errors.hpp"

namespace monolab {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
  auto integer = [&](std::string part) {
    const auto b = part.find_first_not_of(" \t");
    const auto e = part.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty");
    part = part.substr(b, e - b + 1);
    std::size_t used = 0;
    const long long v = std::stoll(part, &used);
    if (used != part.size()) throw std::invalid_argument("trailing characters");
    return v;
  };
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(integer(text));
    return Rational(integer(text.substr(0, slash)), integer(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "not a rational number: '" + text + "'");
  }
}

RationalMatrix RationalMatrix::inverse() const {
  const Rational d = det();
  if (d == Rational(0)) throw Error(ErrorKind::InconsistentData, "singular matrix has no inverse");
  RationalMatrix r;
  r.e = {e[3] / d, -e[1] / d, -e[2] / d, e[0] / d};
  return r;
}

bool RationalMatrix::is_unipotent_upper() const {
  return e[0] == Rational(1) && e[2] == Rational(0) && e[3] == Rational(1);
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  RationalMatrix r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

std::string to_string(const RationalMatrix& m) {
  return "[[" + to_string(m(0, 0)) + "," + to_string(m(0, 1)) + "],[" + to_string(m(1, 0)) + "," +
         to_string(m(1, 1)) + "]]";
}

}  // namespace monolab
