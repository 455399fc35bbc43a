#include "robinlab/exponents.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace robinlab {
namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("malformed number: " + s);
    for (std::size_t k = i; k < s.size(); ++k) {
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw std::invalid_argument("malformed number: " + s);
    }
    cpp_int v(s.substr(i));
    return s[0] == '-' ? cpp_int(-v) : v;
}

cpp_int pow10(long e) {
    cpp_int r = 1;
    for (long k = 0; k < e; ++k) r *= 10;
    return r;
}

Rational parse_decimal(const std::string& text) {
    std::string mant = text;
    long exp10 = 0;
    const auto epos = text.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = text.substr(0, epos);
        const std::string es = text.substr(epos + 1);
        if (es.empty() || es.size() > 6) throw std::invalid_argument("malformed exponent: " + text);
        exp10 = static_cast<long>(parse_integer(es));
    }
    const auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
        const std::string frac = mant.substr(dot + 1);
        digits = mant.substr(0, dot) + frac;
        exp10 -= static_cast<long>(frac.size());
        if (digits == "" || digits == "-" || digits == "+") throw std::invalid_argument("malformed number: " + text);
    }
    const cpp_int m = parse_integer(digits);
    if (exp10 >= 0) return Rational(m * pow10(exp10));
    return Rational(m, pow10(-exp10));
}

}  // namespace

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const cpp_int num = parse_integer(text.substr(0, slash));
        const cpp_int den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rational(num, den);
    }
    return parse_decimal(text);
}

std::string format_rational(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational bootstrap_step(int N, const Rational& q, const Rational& qn) {
    const Rational denom = Rational(N) - 2 * qn;
    if (denom <= 0) return q;
    return std::min(q, Rational(N) * qn / denom);
}

ExponentChain exponent_bootstrap(int N, const Rational& q) {
    if (N < 3) throw std::invalid_argument("exponent bootstrap needs N >= 3");
    const Rational q0(2 * N, N + 2);
    if (q < q0 || q > Rational(N, 2)) throw std::invalid_argument("q must lie in [2N/(N+2), N/2]");
    ExponentChain out;
    out.N = N;
    out.q = q;
    out.chain.push_back(q0);
    // q_n grows at least geometrically with ratio N/(N-2), so this terminates.
    while (out.chain.back() != q) {
        out.chain.push_back(bootstrap_step(N, q, out.chain.back()));
        if (out.chain.size() > 10000) throw std::logic_error("exponent bootstrap did not terminate");
    }
    return out;
}

InterpolatedExponents interpolation_exponents(int N, const Rational& q, const Rational& p) {
    if (N < 3) throw std::invalid_argument("interpolation exponents need N >= 3");
    if (!(p > N)) throw std::invalid_argument("interpolation exponents need p > N");
    if (q <= 0) throw std::invalid_argument("q must be positive");
    InterpolatedExponents out;
    out.theta = (Rational(N) * q + 2 * q - 2 * N) / (q * (N - 2));
    if (out.theta < 0 || out.theta > 1) throw std::invalid_argument("theta outside [0, 1]");
    const Rational r0(2 * N, N + 2), s0(2), t0(2 * (N - 1), N);
    const Rational r1 = p / 2, s1 = p, t1 = p - 1;
    const auto blend = [&](const Rational& x0, const Rational& x1) {
        return 1 / ((1 - out.theta) / x0 + out.theta / x1);
    };
    out.r = blend(r0, r1);
    out.s = blend(s0, s1);
    out.t = blend(t0, t1);
    return out;
}

InterpolatedExponents interpolation_limit(int N, const Rational& q) {
    if (q >= N) throw std::invalid_argument("limit exponents need q < N");
    InterpolatedExponents out;
    out.theta = (Rational(N) * q + 2 * q - 2 * N) / (q * (N - 2));
    out.r = q;
    out.s = Rational(N) * q / (N - q);
    out.t = Rational(N - 1) * q / (N - q);
    return out;
}

}  // namespace robinlab
