#include "ortho/families.hpp"

#include <sstream>

#include "ortho/error.hpp"
#include "ortho/hypergeom.hpp"

namespace ortho {

const std::vector<FamilyInfo>& family_catalog() {
  static const std::vector<FamilyInfo> catalog = {
      {FamilyName::Wilson, "wilson", {"a", "b", "c", "d"}, "case1",
       "Wilson polynomials on the quadratic lattice x_k = (k+c)^2"},
      {FamilyName::ContinuousHahn, "continuous-hahn", {"a", "b", "c", "d"}, "case2",
       "Continuous Hahn polynomials on the linear complex lattice x_k = ik"},
      {FamilyName::Hahn, "hahn", {"alpha", "beta", "N"}, "case2",
       "Hahn polynomials, finite family on x_k = k"},
      {FamilyName::ContinuousDualHahn, "continuous-dual-hahn", {"a", "b", "c"}, "case3",
       "Continuous dual Hahn polynomials on the quadratic lattice x_k = (k+c)^2"},
      {FamilyName::Krawtchouk, "krawtchouk", {"p", "N"}, "case4",
       "Krawtchouk polynomials, finite family with binomial weights"},
      {FamilyName::Meixner, "meixner", {"c", "beta"}, "case4",
       "Meixner polynomials with negative-binomial weights"},
      {FamilyName::Charlier, "charlier", {"a"}, "case4",
       "Charlier polynomials with Poisson weights"},
  };
  return catalog;
}

namespace {

const FamilyInfo& info_for(FamilyName name) {
  for (const FamilyInfo& fi : family_catalog())
    if (fi.name == name) return fi;
  throw ParameterError("unknown family");
}

const FamilyInfo& info_for_id(const std::string& id) {
  for (const FamilyInfo& fi : family_catalog())
    if (fi.id == id) return fi;
  std::ostringstream msg;
  msg << "unknown family '" << id << "'; known families:";
  for (const FamilyInfo& fi : family_catalog()) msg << " " << fi.id;
  throw ParameterError(msg.str());
}

void check_args(const FamilyInfo& info, const std::map<std::string, Complex>& args) {
  for (const std::string& name : info.arg_names)
    if (!args.count(name))
      throw ParameterError("family '" + info.id + "' requires argument '" + name + "'");
  for (const auto& [name, value] : args) {
    (void)value;
    bool known = false;
    for (const std::string& expected : info.arg_names)
      if (expected == name) known = true;
    if (!known)
      throw ParameterError("family '" + info.id + "' does not take argument '" + name + "'");
  }
}

long require_positive_integer(const FamilyInfo& info, const std::string& name,
                              const Complex& value) {
  if (!value.im.is_zero() || !value.re.is_integer() || !(value.re >= Real(1L)))
    throw ParameterError("family '" + info.id + "' requires '" + name +
                         "' to be a positive integer");
  return value.re.round_to_long();
}

void forbid_value(const FamilyInfo& info, const std::string& name, const Complex& value,
                  long forbidden) {
  if (value == Complex(forbidden))
    throw ParameterError("family '" + info.id + "' requires '" + name + "' != " +
                         std::to_string(forbidden));
}

// Case-1 forward equations for (d1, d2) given the remaining lattice data and
// the canonical parameters (p, r, y1, y2).
std::pair<Complex, Complex> case1_d(const FamilyParams& fp, const Complex& p, const Complex& r,
                                    const Complex& y1, const Complex& y2) {
  Complex one(1L);
  Complex d1 = fp.a2 * (fp.b2 * ((y1 - one) * (y2 - one) * (p + r - y1 - y2 - Complex(2L)) +
                                 (r - one) * (p - Complex(2L))) -
                        (r - one) * fp.b0);
  Complex d2 = fp.a2 * (fp.b2 * ((y1 + y2) * (p + r - y1 - y2 - one) + y1 * y2 -
                                 r * (p - one)) -
                        fp.b0);
  return {d1, d2};
}

}  // namespace

FamilySpec make_family(FamilyName name, const std::map<std::string, Complex>& args) {
  const FamilyInfo& info = info_for(name);
  check_args(info, args);

  FamilySpec spec;
  spec.name = name;
  spec.id = info.id;
  spec.args = args;
  FamilyParams& fp = spec.params;
  Complex one(1L);
  Complex i = Complex::i();

  switch (name) {
    case FamilyName::Wilson: {
      Complex a = args.at("a"), b = args.at("b"), c = args.at("c"), d = args.at("d");
      Complex r = a + b + c + d;
      Complex p = Real(2L) * c + one;
      Complex y1 = c + d;
      Complex y2 = b + c;
      fp.a2 = one;
      fp.a1 = r - one;
      fp.b2 = one;
      fp.b1 = Real(2L) * c;
      fp.b0 = c * c;
      std::tie(fp.d1, fp.d2) = case1_d(fp, p, r, y1, y2);
      break;
    }
    case FamilyName::ContinuousHahn: {
      Complex a = args.at("a"), b = args.at("b"), c = args.at("c"), d = args.at("d");
      Complex r = a + b + c + d;
      fp.a2 = one;
      fp.a1 = r - one;
      fp.b2 = Complex(0L);
      fp.b1 = i;
      fp.b0 = Complex(0L);
      fp.d1 = i * ((r - one) + (a + c - one) * (a + d - one));
      fp.d2 = i * (a - b);
      break;
    }
    case FamilyName::Hahn: {
      Complex alpha = args.at("alpha"), beta = args.at("beta");
      long N = require_positive_integer(info, "N", args.at("N"));
      fp.a2 = one;
      fp.a1 = alpha + beta + one;
      fp.b2 = Complex(0L);
      fp.b1 = one;
      fp.b0 = Complex(0L);
      fp.d1 = Complex(0L) - (Real(N) * alpha - beta - one);
      fp.d2 = Complex(0L) - (Real(N) + beta + one);
      break;
    }
    case FamilyName::ContinuousDualHahn: {
      Complex a = args.at("a"), b = args.at("b"), c = args.at("c");
      fp.a2 = Complex(0L);
      fp.a1 = one;
      fp.b2 = one;
      fp.b1 = Real(2L) * c;
      fp.b0 = c * c;
      fp.d1 = a * b + a * c + b * c - a - b;
      fp.d2 = a + b;
      break;
    }
    case FamilyName::Krawtchouk: {
      Complex p = args.at("p");
      long N = require_positive_integer(info, "N", args.at("N"));
      forbid_value(info, "p", p, 0);
      forbid_value(info, "p", p, 1);
      fp.a2 = Complex(0L);
      fp.a1 = one;
      fp.b2 = Complex(0L);
      fp.b1 = one;
      fp.b0 = Complex(0L);
      fp.d2 = p - one;
      fp.d1 = Complex(0L) - (Real(N) * p + p - one);
      break;
    }
    case FamilyName::Meixner: {
      Complex c = args.at("c"), beta = args.at("beta");
      forbid_value(info, "c", c, 0);
      forbid_value(info, "c", c, 1);
      fp.a2 = Complex(0L);
      fp.a1 = one;
      fp.b2 = Complex(0L);
      fp.b1 = one;
      fp.b0 = Complex(0L);
      fp.d2 = one / (c - one);
      fp.d1 = (beta * c - one) / (c - one);
      break;
    }
    case FamilyName::Charlier: {
      Complex a = args.at("a");
      forbid_value(info, "a", a, 0);
      fp.a2 = Complex(0L);
      fp.a1 = one;
      fp.b2 = Complex(0L);
      fp.b1 = one;
      fp.b0 = Complex(0L);
      fp.d2 = Complex(-1L);
      fp.d1 = one - a;
      break;
    }
  }
  return spec;
}

FamilySpec make_family(const std::string& id, const std::map<std::string, Complex>& args) {
  return make_family(info_for_id(id).name, args);
}

Complex binomial(const Complex& x, long k) {
  if (k < 0) return Complex(0L);
  return shifted_factorial(x - Complex(Real(k)) + Complex(1L), k) /
         factorial(static_cast<unsigned long>(k));
}

std::optional<Complex> classical_weight(const FamilySpec& spec, long k) {
  if (k < 0) return Complex(0L);
  Complex one(1L);
  switch (spec.name) {
    case FamilyName::Krawtchouk: {
      long N = spec.args.at("N").re.round_to_long();
      if (k > N) return Complex(0L);
      Complex p = spec.args.at("p");
      return binomial(Complex(Real(N)), k) * pow(p, k) * pow(one - p, N - k);
    }
    case FamilyName::Charlier: {
      // Poisson: e^{-a} a^k / k!
      Complex a = spec.args.at("a");
      return exp(Complex(0L) - a) * pow(a, k) / factorial(static_cast<unsigned long>(k));
    }
    case FamilyName::Meixner: {
      // Negative binomial: (beta)_k c^k (1-c)^beta / k!
      Complex c = spec.args.at("c");
      Complex beta = spec.args.at("beta");
      Complex head = shifted_factorial(beta, k) * pow(c, k) /
                     factorial(static_cast<unsigned long>(k));
      Complex base = one - c;
      if (beta.im.is_zero() && beta.re.is_integer() && beta.re >= Real(0L))
        return head * pow(base, beta.re.round_to_long());
      if (beta.im.is_zero() && c.im.is_zero() && base.re > Real(0L))
        return head * Complex(exp(beta.re * log(base.re)));
      return std::nullopt;  // complex power with non-integer exponent unavailable
    }
    case FamilyName::Hahn: {
      // C(alpha+k, k) C(beta+N-k, N-k) / C(N+alpha+beta+1, N)
      long N = spec.args.at("N").re.round_to_long();
      if (k > N) return Complex(0L);
      Complex alpha = spec.args.at("alpha");
      Complex beta = spec.args.at("beta");
      Complex denom = binomial(Complex(Real(N)) + alpha + beta + one, N);
      if (denom.is_zero()) return std::nullopt;
      return binomial(alpha + Complex(Real(k)), k) *
             binomial(beta + Complex(Real(N - k)), N - k) / denom;
    }
    default:
      return std::nullopt;
  }
}

std::optional<Complex> alpha_closed_form(const FamilySpec& spec, long n) {
  if (n < 1) throw ParameterError("recurrence coefficient alpha_n needs n >= 1");
  Complex one(1L), two(2L);
  Complex nn{Real(n)};
  Complex n2{Real(2 * n)};
  switch (spec.name) {
    case FamilyName::Wilson: {
      Complex a = spec.args.at("a"), b = spec.args.at("b"), c = spec.args.at("c"),
              d = spec.args.at("d");
      Complex r = a + b + c + d;
      Complex p = two * c + one;
      Complex y1 = c + d;
      Complex y2 = b + c;
      Complex num = nn * (nn + y1 - one) * (nn + y2 - one) * (nn - p + y1 + y2) *
                    (nn - two + r) * (nn + r - y1 - one) * (nn + r - y2 - one) *
                    (nn + p + r - y1 - y2 - two);
      Complex den = (n2 + r - Complex(3L)) * (n2 + r - two) * (n2 + r - two) *
                    (n2 + r - one);
      return num / den;  // b2 = 1, so the b2^2 prefactor is 1
    }
    case FamilyName::ContinuousHahn: {
      Complex a = spec.args.at("a"), b = spec.args.at("b"), c = spec.args.at("c"),
              d = spec.args.at("d");
      Complex r = a + b + c + d;
      // -b1^2 = 1 with b1 = i
      Complex num = nn * (nn + r - two) * (nn + a + c - one) * (nn + a + d - one) *
                    (nn + b + c - one) * (nn + b + d - one);
      Complex den = (n2 + r - two) * (n2 + r - two) * (n2 + r - Complex(3L)) *
                    (n2 + r - one);
      return num / den;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace ortho
