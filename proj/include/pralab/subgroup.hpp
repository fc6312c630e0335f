#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "pralab/projective.hpp"

namespace pralab
{

class SubgroupError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * An explicitly enumerated subgroup of an enumerated ambient group.
 *
 * Elements are kept as a sorted list of ambient indices plus a membership
 * bitset; orbits partition P^1(q) and are sorted by their least point.
 */
class Subgroup
{
public:
  Subgroup(GroupPtr ambient, std::vector<ElemIndex> generators, std::vector<ElemIndex> elements);

  GroupPtr const &ambient() const { return ambient_; }
  std::vector<ElemIndex> const &elements() const { return elements_; }
  std::vector<ElemIndex> const &generators() const { return generators_; }
  std::size_t order() const { return elements_.size(); }
  bool contains(ElemIndex x) const { return members_.test(x); }
  boost::dynamic_bitset<> const &members() const { return members_; }
  std::vector<std::vector<Point>> const &orbits() const { return orbits_; }
  std::vector<std::size_t> orbit_sizes() const;
  bool is_proper() const { return order() < ambient_->size(); }
  bool operator==(Subgroup const &other) const
  { return ambient_->same_as(*other.ambient_) && elements_ == other.elements_; }

private:
  GroupPtr ambient_;
  std::vector<ElemIndex> generators_;
  std::vector<ElemIndex> elements_;
  boost::dynamic_bitset<> members_;
  std::vector<std::vector<Point>> orbits_;
};

/// <gens> by breadth-first closure under multiplication by the generators.
Subgroup closure(GroupPtr const &ambient, std::span<ElemIndex const> gens);
Subgroup closure(std::span<GroupElem const> gens, GroupPtr const &ambient);

/// Order of <gens>; stops early and returns the group order once more than
/// half the group has been reached, since no proper subgroup is that large.
std::size_t closure_order(Group const &group, std::span<ElemIndex const> gens);

bool generates(Group const &group, std::span<ElemIndex const> tuple);

/// Some entry can be dropped with the rest still generating.
bool is_redundant(Group const &group, std::span<ElemIndex const> tuple);
/// Index of a droppable entry, if any.
std::optional<std::size_t> redundant_index(Group const &group, std::span<ElemIndex const> tuple);

bool generates(std::span<GroupElem const> tuple);
bool is_redundant(std::span<GroupElem const> tuple);

/// Orbit of size <= 2 on P^1(q), or contained in the normalizer of a
/// maximal non-split torus. Throws for the whole ambient group.
bool is_structural(Subgroup const &h);

enum class SubgroupLabel
{
  trivial,
  cyclic,
  elementary_abelian_p,
  borel_type,
  dihedral,
  a4,
  s4,
  a5,
  psl_subfield,
  pgl_subfield,
  full_group,
  other_structural,
};

struct SubgroupClass
{
  SubgroupLabel label;
  std::uint32_t q1 = 0; // subfield order for the subfield labels

  bool is_small() const
  { return label == SubgroupLabel::a4 || label == SubgroupLabel::s4 || label == SubgroupLabel::a5; }
  bool is_subfield() const
  { return label == SubgroupLabel::psl_subfield || label == SubgroupLabel::pgl_subfield; }
  bool operator==(SubgroupClass const &) const = default;
};

std::string to_string(SubgroupClass const &c);

/// Places h in the Dickson table. Throws SubgroupError("not in Dickson
/// table") if no row matches.
SubgroupClass classify_subgroup(Subgroup const &h);

/// N_{PGL(2,q)}(h), always computed inside PGL(2,q).
Subgroup normalizer(Subgroup const &h);

struct Centralizer
{
  Subgroup group;
  /// Generator when the centralizer is cyclic.
  std::optional<ElemIndex> generator;
};

/// {x in h : xw = wx}; w is an element of h's ambient group.
Centralizer centralizer(Subgroup const &h, ElemIndex w);

/// Some g in PGL(2,q) (as a PGL index) with g^-1 h g = k. Throws if none exists.
ElemIndex find_conjugator(Subgroup const &h, Subgroup const &k);

/// Subgroup of PGL(2,q) holding the same elements as h.
Subgroup lift_to_pgl(Subgroup const &h);

} // namespace pralab
