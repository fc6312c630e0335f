#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pralab/field.hpp"

namespace pralab
{

enum class GroupKind { psl, pgl };

enum class ElementType { identity, unipotent, split, non_split };

std::string to_string(GroupKind kind);
std::string to_string(ElementType type);
GroupKind parse_group_kind(std::string_view text);

/// Row-major 2x2 matrix (a, b, c, d) over GF(q).
using Mat2 = std::array<Fq, 4>;

/// Canonical entries packed base q: ((a q + b) q + c) q + d < q^4.
using ElemCode = std::uint32_t;

/// Position of an element in the enumeration of its group.
using ElemIndex = std::uint32_t;

/// Point of P^1(q): field values 0..q-1, and q for the point at infinity.
using Point = std::uint32_t;

class GroupError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * PSL(2,q) or PGL(2,q) for odd q, realised as canonical projective matrices:
 * the first nonzero entry in (a, b, c, d) is 1. PSL(2,q) is the subset with
 * square determinant.
 *
 * Groups of order at most max_enumerated are enumerated at construction in
 * ascending code order, which gives every element a dense ElemIndex; all
 * of the exhaustive machinery works on those indices. Groups up to
 * max_cayley_table elements additionally carry a full multiplication table.
 */
class Group : public std::enable_shared_from_this<Group>
{
public:
  static constexpr std::size_t max_enumerated = 1'000'000;
  static constexpr std::size_t max_cayley_table = 2500;

  static std::shared_ptr<const Group> make(GroupKind kind, FieldPtr field);
  static std::shared_ptr<const Group> make(GroupKind kind, std::uint32_t q);

  GroupKind kind() const { return kind_; }
  FieldSpec const &field() const { return *field_; }
  FieldPtr const &field_ptr() const { return field_; }
  std::uint32_t q() const { return field_->q(); }
  std::uint32_t p() const { return field_->p(); }
  std::uint64_t order() const { return order_; }
  std::string name() const;

  // matrix level

  /// Canonical representative, or nullopt for a singular matrix.
  std::optional<Mat2> canonical(Mat2 m) const;
  Mat2 canonical_checked(Mat2 m) const;
  bool contains(Mat2 const &canonical) const;
  Mat2 mat_mul(Mat2 const &x, Mat2 const &y) const;
  Mat2 mat_inv(Mat2 const &x) const;
  Fq det(Mat2 const &m) const;
  ElemCode code_of(Mat2 const &m) const;
  Mat2 decode(ElemCode code) const;
  Point act(Mat2 const &m, Point z) const;
  ElementType classify(Mat2 const &canonical) const;

  Point infinity() const { return q(); }
  std::uint32_t point_count() const { return q() + 1; }

  // dense level; requires an enumerated group

  bool enumerated() const { return !codes_.empty(); }
  std::size_t size() const { return codes_.size(); }
  ElemIndex identity() const { return identity_; }

  ElemIndex mul(ElemIndex x, ElemIndex y) const
  {
    if (!cayley_.empty())
      return cayley_[std::size_t(x) * codes_.size() + y];
    return index_of(mat_mul(mats_[x], mats_[y]));
  }
  ElemIndex inv(ElemIndex x) const { return inv_[x]; }
  ElemIndex pow(ElemIndex x, std::int64_t n) const;
  /// g^-1 x g
  ElemIndex conj(ElemIndex x, ElemIndex g) const { return mul(inv_[g], mul(x, g)); }
  std::uint32_t order_of(ElemIndex x) const { return orders_[x]; }
  ElementType type_of(ElemIndex x) const { return types_[x]; }
  Point act(ElemIndex x, Point z) const { return act(mats_[x], z); }
  Mat2 const &matrix(ElemIndex x) const { return mats_[x]; }
  ElemCode code(ElemIndex x) const { return codes_[x]; }
  std::optional<ElemIndex> find(ElemCode code) const;
  ElemIndex index_of(Mat2 const &canonical) const;
  std::vector<ElemCode> const &codes() const { return codes_; }

  /// The ambient PGL(2,q); this group itself when kind() is pgl.
  Group const &pgl() const { return pgl_ ? *pgl_ : *this; }
  std::shared_ptr<const Group> pgl_ptr() const { return pgl_ ? pgl_ : shared_from_this(); }
  ElemIndex to_pgl(ElemIndex x) const { return pgl_ ? to_pgl_[x] : x; }
  /// Index in this group of a PGL element, if it belongs here.
  std::optional<ElemIndex> from_pgl(ElemIndex x) const;

  bool same_as(Group const &other) const
  { return kind_ == other.kind_ && *field_ == *other.field_; }

  std::string format(ElemIndex x) const;
  std::string format(Mat2 const &m) const;
  /// Parses "a,b,c,d" with field elements in digit-string form.
  Mat2 parse_matrix(std::string_view text) const;

private:
  Group(GroupKind kind, FieldPtr field);
  void enumerate();

  GroupKind kind_;
  FieldPtr field_;
  std::uint64_t order_;

  std::vector<ElemCode> codes_;
  std::vector<Mat2> mats_;
  std::vector<ElemIndex> inv_;
  std::vector<std::uint32_t> orders_;
  std::vector<ElementType> types_;
  std::vector<std::uint16_t> cayley_;
  std::vector<ElemIndex> code_lookup_;
  std::unordered_map<ElemCode, ElemIndex> code_map_;
  ElemIndex identity_ = 0;

  std::shared_ptr<const Group> pgl_;
  std::vector<ElemIndex> to_pgl_;
};

using GroupPtr = std::shared_ptr<const Group>;

/// An element together with its group; the checked public value type.
class GroupElem
{
public:
  GroupElem(GroupPtr group, Mat2 canonical_matrix);
  GroupElem(GroupPtr group, ElemIndex index);

  GroupPtr const &group() const { return group_; }
  Mat2 const &matrix() const { return m_; }
  ElemCode code() const { return group_->code_of(m_); }
  ElemIndex index() const { return group_->index_of(m_); }

  bool operator==(GroupElem const &other) const;
  std::string to_string() const { return group_->format(m_); }

private:
  GroupPtr group_;
  Mat2 m_;
};

/// Scales (a, b, c, d) to its canonical representative in `group`.
/// Throws GroupError for a singular matrix or a nonsquare determinant in PSL.
GroupElem canonicalize(Fq a, Fq b, Fq c, Fq d, GroupPtr const &group);

GroupElem multiply(GroupElem const &x, GroupElem const &y);
GroupElem invert(GroupElem const &x);
GroupElem identity_of(GroupPtr const &group);
Point act(GroupElem const &x, Point z);
std::uint32_t element_order(GroupElem const &x);
ElementType classify(GroupElem const &x);
std::vector<GroupElem> enumerate_group(GroupPtr const &group);

/// Number of points of P^1(q) fixed by x.
std::uint32_t fixed_point_count(Group const &group, ElemIndex x);

} // namespace pralab
