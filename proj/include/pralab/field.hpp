#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pralab
{

/// Raw element of GF(p^e): the little-endian coefficient vector read as a base-p number.
using Fq = std::uint32_t;

class FieldError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * GF(q) for q = p^e, p an odd prime.
 *
 * Elements are polynomials of degree < e over GF(p) reduced modulo a fixed
 * monic irreducible polynomial, encoded as integers in [0, q). The modulus
 * is the lexicographically smallest monic irreducible of degree e, with
 * coefficients compared constant term first, so the encoding is identical
 * across runs and machines.
 *
 * Instances are immutable after construction and safe to share between
 * threads.
 */
class FieldSpec
{
public:
  static constexpr std::uint32_t max_order = 1u << 20;

  static std::shared_ptr<const FieldSpec> make(std::uint32_t p, std::uint32_t e);

  /// Parses "p^e:modulus-digits" and checks the modulus against make(p, e).
  static std::shared_ptr<const FieldSpec> parse(std::string_view text);

  std::uint32_t p() const { return p_; }
  std::uint32_t e() const { return e_; }
  std::uint32_t q() const { return q_; }

  /// Monic modulus, e + 1 coefficients, constant term first.
  std::vector<std::uint32_t> const &modulus() const { return modulus_; }

  Fq zero() const { return 0; }
  Fq one() const { return 1; }

  Fq add(Fq a, Fq b) const;
  Fq sub(Fq a, Fq b) const;
  Fq neg(Fq a) const;
  Fq mul(Fq a, Fq b) const;
  Fq inv(Fq a) const;
  Fq pow(Fq a, std::uint64_t n) const;
  bool is_square(Fq a) const { return squares_[a] != 0; }

  /// Embeds an integer through the prime subfield.
  Fq from_int(std::int64_t n) const;

  std::vector<std::uint32_t> digits(Fq a) const;
  Fq from_digits(std::span<std::uint32_t const> coeffs) const;

  /// Little-endian digit string, e.g. "21" is 2 + x in GF(9). Fields with
  /// p > 10 separate digits with '.'; prime fields print the plain residue.
  std::string format(Fq a) const;
  Fq parse_element(std::string_view text) const;

  /// "p^e:modulus-digits"
  std::string serialize() const;

  bool operator==(FieldSpec const &other) const
  { return p_ == other.p_ && e_ == other.e_ && modulus_ == other.modulus_; }

private:
  FieldSpec(std::uint32_t p, std::uint32_t e);

  Fq poly_mul(Fq a, Fq b) const;
  void build_tables();

  std::uint32_t p_;
  std::uint32_t e_;
  std::uint32_t q_;
  std::vector<std::uint32_t> modulus_;

  // full tables for q <= table_limit, log/exp tables otherwise
  static constexpr std::uint32_t table_limit = 1024;
  std::vector<Fq> add_table_;
  std::vector<Fq> mul_table_;
  std::vector<std::uint32_t> log_;
  std::vector<Fq> exp_;
  std::vector<Fq> inv_;
  std::vector<std::uint8_t> squares_;
};

using FieldPtr = std::shared_ptr<const FieldSpec>;

bool is_prime(std::uint64_t n);

/// Prime factors of n without multiplicity, ascending.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// Checks irreducibility over GF(p) of a monic polynomial (constant term first)
/// by trial division against every monic polynomial of degree <= deg/2.
bool is_irreducible(std::span<std::uint32_t const> monic, std::uint32_t p);

/**
 * Checked element wrapper: carries its field so mixed-field arithmetic is
 * rejected. The hot paths elsewhere work on raw Fq values.
 */
class FieldElem
{
public:
  FieldElem(FieldPtr field, Fq value);

  FieldPtr const &field() const { return field_; }
  Fq value() const { return value_; }
  std::vector<std::uint32_t> coeffs() const { return field_->digits(value_); }

  FieldElem operator+(FieldElem const &other) const;
  FieldElem operator-(FieldElem const &other) const;
  FieldElem operator*(FieldElem const &other) const;
  FieldElem inverse() const;
  bool is_square() const { return field_->is_square(value_); }

  bool operator==(FieldElem const &other) const;

  std::string to_string() const { return field_->format(value_); }

private:
  void check_same(FieldElem const &other) const;

  FieldPtr field_;
  Fq value_;
};

} // namespace pralab
