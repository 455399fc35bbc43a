#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace robinlab {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "a/b", an integer, or a finite decimal ("1.5", "2.4e-1") exactly.
Rational parse_rational(const std::string& text);
/// "n" for integers, "n/d" otherwise.
std::string format_rational(const Rational& r);
double to_double(const Rational& r);

/// Bootstrap chain q_0 = 2N/(N+2), q_{n+1} = min{q, N q_n / (N - 2 q_n)}
/// (a nonpositive denominator counts as infinity).
struct ExponentChain {
    int N = 3;
    Rational q;
    std::vector<Rational> chain;
};

/// Throws std::invalid_argument unless N >= 3 and 2N/(N+2) <= q <= N/2.
ExponentChain exponent_bootstrap(int N, const Rational& q);

/// One step of the bootstrap recursion.
Rational bootstrap_step(int N, const Rational& q, const Rational& qn);

struct InterpolatedExponents {
    Rational theta;
    Rational r;
    Rational s;
    Rational t;
};

/// theta = (Nq + 2q - 2N) / (q (N - 2)) and the convex combinations
/// 1/x = (1 - theta)/x0 + theta/x1 of (r0, s0, t0) = (2N/(N+2), 2, 2(N-1)/N)
/// and (r1, s1, t1) = (p/2, p, p - 1). Requires p > N and theta in [0, 1].
InterpolatedExponents interpolation_exponents(int N, const Rational& q, const Rational& p);

/// The p -> N limit (q, Nq/(N-q), (N-1)q/(N-q)).
InterpolatedExponents interpolation_limit(int N, const Rational& q);

}  // namespace robinlab
