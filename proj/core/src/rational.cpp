#include "amalgam/rational.hpp"

#include "amalgam/errors.hpp"

#include <cctype>

namespace amalgam {

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw ParseError("rational '" + std::string(text) + "' is not of the form p/q");
  }
  std::string_view num = text.substr(0, slash);
  const std::string_view den = text.substr(slash + 1);
  bool negative = false;
  if (!num.empty() && num.front() == '-') {
    negative = true;
    num.remove_prefix(1);
  }
  if (!all_digits(num) || !all_digits(den)) {
    throw ParseError("rational '" + std::string(text) + "' is not of the form p/q");
  }
  if ((num.size() > 1 && num.front() == '0') || (den.size() > 1 && den.front() == '0')) {
    throw ParseError("rational '" + std::string(text) + "' has leading zeros");
  }
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) throw ParseError("rational '" + std::string(text) + "' has zero denominator");
  if (negative && p == 0) throw ParseError("rational '" + std::string(text) + "' is a negative zero");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  if (g != 1) {
    throw ParseError("rational '" + std::string(text) + "' is not in lowest terms");
  }
  if (negative) p = -p;
  Rational r(p, q);
  r.canonicalize();
  return r;
}

}  // namespace amalgam
