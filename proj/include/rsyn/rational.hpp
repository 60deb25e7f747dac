#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace rsyn {

/// Exact rational scalar. All geometry and dynamics arithmetic is performed
/// on this type; nothing in the toolkit rounds.
using Rat = mpq_class;

using Vec = std::vector<Rat>;
using Mat = std::vector<std::vector<Rat>>; // row-major

/// Parses "p/q", "p", or a plain decimal like "-0.25" into a canonical Rat.
/// Throws std::invalid_argument on malformed input.
Rat rat_parse(const std::string& text);

/// Canonical textual form: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rat& q);

double rat_to_double(const Rat& q);

/// Nearest rational with the given power-of-two denominator.
Rat rat_round_to_denom(double value, unsigned long denom_pow2);

/// num/den in canonical form. The raw two-argument mpq constructor requires
/// coprime arguments; this one does not.
Rat rat_frac(long num, long den);

Rat rat_abs(const Rat& q);

Vec vec_of(std::initializer_list<long> xs);

bool vec_eq(const Vec& a, const Vec& b);

} // namespace rsyn
