#ifndef NEWSUM_ORACLES_HPP
#define NEWSUM_ORACLES_HPP

#include "newsum/real.hpp"

namespace newsum::oracles {

// Reference values used by the verification suites. These are computed by
// textbook methods (argument shift + Stirling series with Bernoulli-number
// corrections) and deliberately never call into the series/sum engines they
// are used to check.

// ln Gamma(x) for x > 0, absolute error below 2^(-precision + 16).
Real log_gamma(const Real& x);

// psi(x) = Gamma'(x)/Gamma(x) for x > 0, same error budget.
Real digamma(const Real& x);

// Harmonic-number function H_x = digamma(x + 1) + gamma, for x > -1.
Real harmonic(const Real& x);

// Euler's constant at the requested precision. Two independent schemes
// (Stirling-based -psi(1) and the Bessel-sum limit) are compared before the
// value is cached; a disagreement throws InternalError.
Real euler_gamma(long precision);

// The individual schemes, exposed so tests can check their agreement.
Real euler_gamma_stirling(long precision);
Real euler_gamma_bessel(long precision);

// Exact Bernoulli number B_n rounded to the requested precision; B_1 = -1/2.
Real bernoulli_number(unsigned n, long precision);

} // namespace newsum::oracles

#endif
