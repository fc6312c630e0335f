#include "pralab/projective.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace pralab
{

std::string to_string(GroupKind kind) { return kind == GroupKind::psl ? "psl" : "pgl"; }

std::string to_string(ElementType type)
{
  switch (type) {
  case ElementType::identity:
    return "identity";
  case ElementType::unipotent:
    return "unipotent";
  case ElementType::split:
    return "split";
  case ElementType::non_split:
    return "non-split";
  }
  return "?";
}

GroupKind parse_group_kind(std::string_view text)
{
  if (text == "psl" || text == "PSL")
    return GroupKind::psl;
  if (text == "pgl" || text == "PGL")
    return GroupKind::pgl;
  throw GroupError("unknown group kind '" + std::string(text) + "' (expected psl or pgl)");
}

namespace
{

constexpr ElemIndex no_index = std::numeric_limits<ElemIndex>::max();

} // namespace

GroupPtr Group::make(GroupKind kind, FieldPtr field)
{
  return GroupPtr(new Group(kind, std::move(field)));
}

GroupPtr Group::make(GroupKind kind, std::uint32_t q)
{
  auto const factors = prime_factors(q);
  if (q < 3 || factors.size() != 1)
    throw GroupError("q = " + std::to_string(q) + " is not an odd prime power");
  std::uint32_t const p = static_cast<std::uint32_t>(factors[0]);
  std::uint32_t e = 0;
  for (std::uint32_t m = q; m > 1; m /= p)
    ++e;
  return make(kind, FieldSpec::make(p, e));
}

Group::Group(GroupKind kind, FieldPtr field)
: kind_(kind), field_(std::move(field))
{
  std::uint64_t const q = field_->q();
  order_ = q * (q - 1) * (q + 1);
  if (kind_ == GroupKind::psl)
    order_ /= 2;

  if (order_ <= max_enumerated)
    enumerate();

  if (kind_ == GroupKind::psl) {
    pgl_ = make(GroupKind::pgl, field_);
    if (enumerated() && pgl_->enumerated()) {
      to_pgl_.resize(size());
      for (ElemIndex i = 0; i < size(); ++i)
        to_pgl_[i] = pgl_->index_of(mats_[i]);
    }
  }
}

std::string Group::name() const
{
  return (kind_ == GroupKind::psl ? "PSL(2," : "PGL(2,") + std::to_string(q()) + ")";
}

std::optional<Mat2> Group::canonical(Mat2 m) const
{
  auto const &f = *field_;
  if (f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2])) == 0)
    return std::nullopt;
  std::size_t lead = 0;
  while (m[lead] == 0)
    ++lead;
  if (m[lead] != 1) {
    Fq const s = f.inv(m[lead]);
    for (auto &x : m)
      x = f.mul(x, s);
  }
  return m;
}

Mat2 Group::canonical_checked(Mat2 m) const
{
  for (auto x : m) {
    if (x >= q())
      throw GroupError("matrix entry out of range for GF(" + std::to_string(q()) + ")");
  }
  auto c = canonical(m);
  if (!c)
    throw GroupError("singular matrix " + format(m));
  if (!contains(*c))
    throw GroupError("matrix " + format(m) + " has nonsquare determinant, not in " + name());
  return *c;
}

Fq Group::det(Mat2 const &m) const
{
  auto const &f = *field_;
  return f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2]));
}

bool Group::contains(Mat2 const &m) const
{
  Fq const d = det(m);
  if (d == 0)
    return false;
  return kind_ == GroupKind::pgl || field_->is_square(d);
}

Mat2 Group::mat_mul(Mat2 const &x, Mat2 const &y) const
{
  auto const &f = *field_;
  Mat2 r{f.add(f.mul(x[0], y[0]), f.mul(x[1], y[2])), f.add(f.mul(x[0], y[1]), f.mul(x[1], y[3])),
         f.add(f.mul(x[2], y[0]), f.mul(x[3], y[2])), f.add(f.mul(x[2], y[1]), f.mul(x[3], y[3]))};
  return *canonical(r);
}

Mat2 Group::mat_inv(Mat2 const &x) const
{
  auto const &f = *field_;
  return *canonical(Mat2{x[3], f.neg(x[1]), f.neg(x[2]), x[0]});
}

ElemCode Group::code_of(Mat2 const &m) const
{
  ElemCode const q = this->q();
  return ((m[0] * q + m[1]) * q + m[2]) * q + m[3];
}

Mat2 Group::decode(ElemCode code) const
{
  ElemCode const q = this->q();
  Mat2 m;
  for (int i = 3; i >= 0; --i) {
    m[i] = code % q;
    code /= q;
  }
  return m;
}

Point Group::act(Mat2 const &m, Point z) const
{
  auto const &f = *field_;
  if (z == infinity())
    return m[2] == 0 ? infinity() : f.mul(m[0], f.inv(m[2]));
  Fq const num = f.add(f.mul(m[0], z), m[1]);
  Fq const den = f.add(f.mul(m[2], z), m[3]);
  if (den == 0)
    return infinity();
  return f.mul(num, f.inv(den));
}

ElementType Group::classify(Mat2 const &m) const
{
  if (m == Mat2{1, 0, 0, 1})
    return ElementType::identity;
  auto const &f = *field_;
  Fq const tr = f.add(m[0], m[3]);
  Fq const disc = f.sub(f.mul(tr, tr), f.mul(f.from_int(4), det(m)));
  if (disc == 0)
    return ElementType::unipotent;
  return f.is_square(disc) ? ElementType::split : ElementType::non_split;
}

void Group::enumerate()
{
  auto const &f = *field_;
  Fq const q = this->q();
  codes_.reserve(order_);
  mats_.reserve(order_);

  auto push = [this](Mat2 const &m) {
    if (contains(m)) {
      mats_.push_back(m);
      codes_.push_back(code_of(m));
    }
  };

  // a = 0 forces b = 1 and c != 0; these codes precede every a = 1 code
  for (Fq c = 1; c < q; ++c) {
    for (Fq d = 0; d < q; ++d)
      push({0, 1, c, d});
  }
  for (Fq b = 0; b < q; ++b) {
    for (Fq c = 0; c < q; ++c) {
      Fq const bc = f.mul(b, c);
      for (Fq d = 0; d < q; ++d) {
        if (d != bc)
          push({1, b, c, d});
      }
    }
  }

  if (codes_.size() != order_)
    throw GroupError("enumeration of " + name() + " produced " + std::to_string(codes_.size()) +
                     " elements");

  std::uint64_t const code_space = std::uint64_t(q) * q * q * q;
  if (code_space <= (1u << 24)) {
    code_lookup_.assign(code_space, no_index);
    for (ElemIndex i = 0; i < codes_.size(); ++i)
      code_lookup_[codes_[i]] = i;
  } else {
    code_map_.reserve(codes_.size());
    for (ElemIndex i = 0; i < codes_.size(); ++i)
      code_map_.emplace(codes_[i], i);
  }

  identity_ = index_of(Mat2{1, 0, 0, 1});

  std::size_t const n = codes_.size();
  inv_.resize(n);
  types_.resize(n);
  for (ElemIndex i = 0; i < n; ++i) {
    inv_[i] = index_of(mat_inv(mats_[i]));
    types_[i] = classify(mats_[i]);
  }

  if (n <= max_cayley_table) {
    cayley_.resize(n * n);
    for (ElemIndex i = 0; i < n; ++i) {
      for (ElemIndex j = 0; j < n; ++j)
        cayley_[std::size_t(i) * n + j] = static_cast<std::uint16_t>(index_of(mat_mul(mats_[i], mats_[j])));
    }
  }

  // direct powering; every order divides p, q - 1 or q + 1
  orders_.resize(n);
  for (ElemIndex i = 0; i < n; ++i) {
    std::uint32_t k = 1;
    ElemIndex y = i;
    while (y != identity_ && k <= q + 1) {
      y = mul(y, i);
      ++k;
    }
    if (y != identity_)
      throw GroupError("element order exceeds q + 1 in " + name());
    orders_[i] = k;
  }
}

std::optional<ElemIndex> Group::find(ElemCode code) const
{
  if (!code_lookup_.empty()) {
    if (code >= code_lookup_.size() || code_lookup_[code] == no_index)
      return std::nullopt;
    return code_lookup_[code];
  }
  auto it = code_map_.find(code);
  if (it == code_map_.end())
    return std::nullopt;
  return it->second;
}

ElemIndex Group::index_of(Mat2 const &m) const
{
  if (!enumerated())
    throw GroupError(name() + " is too large to enumerate");
  auto idx = find(code_of(m));
  if (!idx)
    throw GroupError("matrix " + format(m) + " is not an element of " + name());
  return *idx;
}

std::optional<ElemIndex> Group::from_pgl(ElemIndex x) const
{
  if (!pgl_)
    return x;
  return find(pgl_->code(x));
}

ElemIndex Group::pow(ElemIndex x, std::int64_t n) const
{
  if (n < 0) {
    x = inv_[x];
    n = -n;
  }
  ElemIndex result = identity_;
  while (n) {
    if (n & 1)
      result = mul(result, x);
    x = mul(x, x);
    n >>= 1;
  }
  return result;
}

std::string Group::format(ElemIndex x) const { return format(mats_[x]); }

std::string Group::format(Mat2 const &m) const
{
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i)
      out += ',';
    out += field_->format(m[i]);
  }
  return out;
}

Mat2 Group::parse_matrix(std::string_view text) const
{
  Mat2 m{};
  std::size_t start = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    auto const comma = text.find(',', start);
    if ((i < 3) == (comma == std::string_view::npos))
      throw GroupError("malformed matrix '" + std::string(text) + "', expected a,b,c,d");
    m[i] = field_->parse_element(text.substr(start, comma - start));
    start = comma + 1;
  }
  return m;
}

GroupElem::GroupElem(GroupPtr group, Mat2 canonical_matrix)
: group_(std::move(group)), m_(canonical_matrix)
{}

GroupElem::GroupElem(GroupPtr group, ElemIndex index)
: group_(std::move(group)), m_(group_->matrix(index))
{}

bool GroupElem::operator==(GroupElem const &other) const
{
  return group_->same_as(*other.group_) && m_ == other.m_;
}

GroupElem canonicalize(Fq a, Fq b, Fq c, Fq d, GroupPtr const &group)
{
  return {group, group->canonical_checked({a, b, c, d})};
}

namespace
{

void check_same_group(GroupElem const &x, GroupElem const &y)
{
  if (x.group() != y.group() && !x.group()->same_as(*y.group()))
    throw GroupError("elements of different groups: " + x.group()->name() + " and " +
                     y.group()->name());
}

} // namespace

GroupElem multiply(GroupElem const &x, GroupElem const &y)
{
  check_same_group(x, y);
  return {x.group(), x.group()->mat_mul(x.matrix(), y.matrix())};
}

GroupElem invert(GroupElem const &x) { return {x.group(), x.group()->mat_inv(x.matrix())}; }

GroupElem identity_of(GroupPtr const &group) { return {group, Mat2{1, 0, 0, 1}}; }

Point act(GroupElem const &x, Point z) { return x.group()->act(x.matrix(), z); }

std::uint32_t element_order(GroupElem const &x)
{
  auto const &g = *x.group();
  Mat2 const id{1, 0, 0, 1};
  Mat2 y = x.matrix();
  std::uint32_t n = 1;
  while (y != id) {
    if (n > g.q() + 1)
      throw GroupError("element order exceeds q + 1");
    y = g.mat_mul(y, x.matrix());
    ++n;
  }
  return n;
}

ElementType classify(GroupElem const &x) { return x.group()->classify(x.matrix()); }

std::vector<GroupElem> enumerate_group(GroupPtr const &group)
{
  if (!group->enumerated())
    throw GroupError(group->name() + " has more than " + std::to_string(Group::max_enumerated) +
                     " elements");
  std::vector<GroupElem> out;
  out.reserve(group->size());
  for (ElemIndex i = 0; i < group->size(); ++i)
    out.emplace_back(group, i);
  return out;
}

std::uint32_t fixed_point_count(Group const &group, ElemIndex x)
{
  std::uint32_t n = 0;
  for (Point z = 0; z < group.point_count(); ++z)
    n += group.act(x, z) == z;
  return n;
}

} // namespace pralab
