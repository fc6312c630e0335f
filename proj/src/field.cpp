#include "pralab/field.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace pralab
{

bool is_prime(std::uint64_t n)
{
  if (n < 2)
    return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0)
      return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n)
{
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0)
        n /= d;
    }
  }
  if (n > 1)
    out.push_back(n);
  return out;
}

namespace
{

using Poly = std::vector<std::uint32_t>;

void trim(Poly &f)
{
  while (!f.empty() && f.back() == 0)
    f.pop_back();
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p)
{
  // p prime, a != 0
  std::uint64_t result = 1, base = a % p;
  std::uint32_t n = p - 2;
  while (n) {
    if (n & 1u)
      result = result * base % p;
    base = base * base % p;
    n >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

// remainder of f modulo g (g nonzero, trimmed)
Poly poly_rem(Poly f, Poly const &g, std::uint32_t p)
{
  trim(f);
  std::uint32_t const lead_inv = inv_mod(g.back(), p);
  while (f.size() >= g.size()) {
    std::uint64_t const factor = std::uint64_t(f.back()) * lead_inv % p;
    std::size_t const shift = f.size() - g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::uint64_t const sub = factor * g[i] % p;
      f[shift + i] = static_cast<std::uint32_t>((f[shift + i] + p - sub) % p);
    }
    trim(f);
  }
  return f;
}

} // namespace

bool is_irreducible(std::span<std::uint32_t const> monic, std::uint32_t p)
{
  Poly f(monic.begin(), monic.end());
  trim(f);
  if (f.size() < 2)
    return false;
  std::size_t const deg = f.size() - 1;
  if (deg == 1)
    return true;

  // every monic divisor of degree d in [1, deg/2]
  for (std::size_t d = 1; d <= deg / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i)
      count *= p;
    Poly g(d + 1, 0);
    g[d] = 1;
    for (std::uint64_t n = 0; n < count; ++n) {
      std::uint64_t m = n;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(m % p);
        m /= p;
      }
      if (poly_rem(f, g, p).empty())
        return false;
    }
  }
  return true;
}

std::shared_ptr<const FieldSpec> FieldSpec::make(std::uint32_t p, std::uint32_t e)
{
  if (!is_prime(p))
    throw FieldError("field characteristic " + std::to_string(p) + " is not prime");
  if (p == 2)
    throw FieldError("characteristic 2 is not supported, p must be odd");
  if (e < 1)
    throw FieldError("extension degree must be at least 1");

  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    q *= p;
    if (q > max_order)
      throw FieldError("field order " + std::to_string(p) + "^" + std::to_string(e) +
                       " exceeds the supported maximum 2^20");
  }

  return std::shared_ptr<const FieldSpec>(new FieldSpec(p, e));
}

FieldSpec::FieldSpec(std::uint32_t p, std::uint32_t e)
: p_(p), e_(e), q_(1)
{
  for (std::uint32_t i = 0; i < e; ++i)
    q_ *= p;

  // smallest monic irreducible; c_0 is the most significant coordinate
  modulus_.assign(e + 1, 0);
  modulus_[e] = 1;
  std::vector<std::uint32_t> c(e, 0);
  for (;;) {
    std::copy(c.begin(), c.end(), modulus_.begin());
    if (is_irreducible(modulus_, p))
      break;
    std::size_t i = e;
    while (i > 0) {
      --i;
      if (++c[i] < p)
        break;
      c[i] = 0;
    }
  }

  build_tables();
}

Fq FieldSpec::poly_mul(Fq a, Fq b) const
{
  auto const da = digits(a), db = digits(b);
  Poly prod(2 * e_ - 1, 0);
  for (std::uint32_t i = 0; i < e_; ++i) {
    for (std::uint32_t j = 0; j < e_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t(da[i]) * db[j]) % p_);
  }
  auto rem = poly_rem(prod, modulus_, p_);
  rem.resize(e_, 0);
  return from_digits(rem);
}

void FieldSpec::build_tables()
{
  // primitive element: g^((q-1)/r) != 1 for each prime r | q-1
  auto slow_pow = [this](Fq a, std::uint64_t n) {
    Fq result = 1;
    while (n) {
      if (n & 1u)
        result = poly_mul(result, a);
      a = poly_mul(a, a);
      n >>= 1;
    }
    return result;
  };

  auto const factors = prime_factors(q_ - 1);
  Fq generator = 0;
  for (Fq g = 1; g < q_; ++g) {
    bool primitive = true;
    for (auto r : factors) {
      if (slow_pow(g, (q_ - 1) / r) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      generator = g;
      break;
    }
  }

  exp_.assign(q_ - 1, 0);
  log_.assign(q_, 0);
  Fq x = 1;
  for (std::uint32_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = x;
    log_[x] = i;
    x = poly_mul(x, generator);
  }

  inv_.assign(q_, 0);
  for (Fq a = 1; a < q_; ++a)
    inv_[a] = exp_[(q_ - 1 - log_[a]) % (q_ - 1)];

  if (q_ <= table_limit) {
    add_table_.resize(std::size_t(q_) * q_);
    mul_table_.resize(std::size_t(q_) * q_);
    for (Fq a = 0; a < q_; ++a) {
      auto const da = digits(a);
      for (Fq b = 0; b < q_; ++b) {
        auto db = digits(b);
        for (std::uint32_t i = 0; i < e_; ++i)
          db[i] = (da[i] + db[i]) % p_;
        add_table_[std::size_t(a) * q_ + b] = from_digits(db);
        mul_table_[std::size_t(a) * q_ + b] =
          (a == 0 || b == 0) ? 0 : exp_[(log_[a] + log_[b]) % (q_ - 1)];
      }
    }
  }

  squares_.assign(q_, 0);
  squares_[0] = 1;
  for (Fq a = 1; a < q_; ++a)
    squares_[exp_[(2 * std::uint64_t(log_[a])) % (q_ - 1)]] = 1;
}

Fq FieldSpec::add(Fq a, Fq b) const
{
  if (!add_table_.empty())
    return add_table_[std::size_t(a) * q_ + b];
  if (e_ == 1)
    return (a + b) % p_;

  Fq result = 0, scale = 1;
  for (std::uint32_t i = 0; i < e_; ++i) {
    result += ((a % p_ + b % p_) % p_) * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return result;
}

Fq FieldSpec::neg(Fq a) const
{
  if (e_ == 1)
    return a == 0 ? 0 : p_ - a;
  Fq result = 0, scale = 1;
  for (std::uint32_t i = 0; i < e_; ++i) {
    Fq const d = a % p_;
    result += ((p_ - d) % p_) * scale;
    a /= p_;
    scale *= p_;
  }
  return result;
}

Fq FieldSpec::sub(Fq a, Fq b) const { return add(a, neg(b)); }

Fq FieldSpec::mul(Fq a, Fq b) const
{
  if (!mul_table_.empty())
    return mul_table_[std::size_t(a) * q_ + b];
  if (a == 0 || b == 0)
    return 0;
  if (e_ == 1)
    return static_cast<Fq>(std::uint64_t(a) * b % p_);
  return exp_[(log_[a] + log_[b]) % (q_ - 1)];
}

Fq FieldSpec::inv(Fq a) const
{
  if (a == 0)
    throw FieldError("division by zero in GF(" + std::to_string(q_) + ")");
  return inv_[a];
}

Fq FieldSpec::pow(Fq a, std::uint64_t n) const
{
  if (n == 0)
    return 1;
  if (a == 0)
    return 0;
  return exp_[(std::uint64_t(log_[a]) * (n % (q_ - 1))) % (q_ - 1)];
}

Fq FieldSpec::from_int(std::int64_t n) const
{
  std::int64_t const r = ((n % std::int64_t(p_)) + p_) % p_;
  return static_cast<Fq>(r);
}

std::vector<std::uint32_t> FieldSpec::digits(Fq a) const
{
  std::vector<std::uint32_t> d(e_);
  for (std::uint32_t i = 0; i < e_; ++i) {
    d[i] = a % p_;
    a /= p_;
  }
  return d;
}

Fq FieldSpec::from_digits(std::span<std::uint32_t const> coeffs) const
{
  Fq result = 0, scale = 1;
  for (std::uint32_t i = 0; i < e_; ++i) {
    std::uint32_t const c = i < coeffs.size() ? coeffs[i] : 0;
    if (c >= p_)
      throw FieldError("coefficient " + std::to_string(c) + " out of range for p = " +
                       std::to_string(p_));
    result += c * scale;
    scale *= p_;
  }
  return result;
}

std::string FieldSpec::format(Fq a) const
{
  if (e_ == 1)
    return std::to_string(a);
  auto const d = digits(a);
  std::string out;
  for (std::uint32_t i = 0; i < e_; ++i) {
    if (p_ > 10 && i > 0)
      out += '.';
    out += std::to_string(d[i]);
  }
  return out;
}

namespace
{

std::uint32_t parse_uint(std::string_view s, std::string_view what)
{
  std::uint32_t value = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw FieldError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  return value;
}

} // namespace

Fq FieldSpec::parse_element(std::string_view text) const
{
  if (e_ == 1) {
    auto const v = parse_uint(text, "field element");
    if (v >= p_)
      throw FieldError("field element " + std::string(text) + " out of range");
    return v;
  }

  std::vector<std::uint32_t> d;
  if (p_ > 10 || text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    for (;;) {
      auto const dot = text.find('.', start);
      d.push_back(parse_uint(text.substr(start, dot - start), "field element"));
      if (dot == std::string_view::npos)
        break;
      start = dot + 1;
    }
  } else {
    for (char ch : text)
      d.push_back(parse_uint(std::string_view(&ch, 1), "field element"));
  }
  if (d.size() != e_)
    throw FieldError("field element '" + std::string(text) + "' must have " +
                     std::to_string(e_) + " digits");
  return from_digits(d);
}

std::string FieldSpec::serialize() const
{
  std::ostringstream os;
  os << p_ << '^' << e_ << ':';
  for (std::size_t i = 0; i < modulus_.size(); ++i) {
    if (p_ > 10 && i > 0)
      os << '.';
    os << modulus_[i];
  }
  return os.str();
}

std::shared_ptr<const FieldSpec> FieldSpec::parse(std::string_view text)
{
  auto const caret = text.find('^');
  auto const colon = text.find(':');
  if (caret == std::string_view::npos || colon == std::string_view::npos || colon < caret)
    throw FieldError("malformed field spec '" + std::string(text) + "'");

  auto const p = parse_uint(text.substr(0, caret), "characteristic");
  auto const e = parse_uint(text.substr(caret + 1, colon - caret - 1), "degree");
  auto field = make(p, e);
  if (field->serialize() != text)
    throw FieldError("field spec '" + std::string(text) + "' does not match the canonical modulus " +
                     field->serialize());
  return field;
}

FieldElem::FieldElem(FieldPtr field, Fq value)
: field_(std::move(field)), value_(value)
{
  if (value_ >= field_->q())
    throw FieldError("field element out of range");
}

void FieldElem::check_same(FieldElem const &other) const
{
  if (field_ != other.field_ && !(*field_ == *other.field_))
    throw FieldError("field elements belong to different fields");
}

FieldElem FieldElem::operator+(FieldElem const &other) const
{
  check_same(other);
  return {field_, field_->add(value_, other.value_)};
}

FieldElem FieldElem::operator-(FieldElem const &other) const
{
  check_same(other);
  return {field_, field_->sub(value_, other.value_)};
}

FieldElem FieldElem::operator*(FieldElem const &other) const
{
  check_same(other);
  return {field_, field_->mul(value_, other.value_)};
}

FieldElem FieldElem::inverse() const { return {field_, field_->inv(value_)}; }

bool FieldElem::operator==(FieldElem const &other) const
{
  check_same(other);
  return value_ == other.value_;
}

} // namespace pralab
