#include "pralab/subgroup.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace pralab
{

namespace
{

// Per-thread visited stamps so generation tests allocate nothing.
struct ClosureScratch
{
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::vector<ElemIndex> queue;

  std::uint32_t begin(std::size_t n)
  {
    if (stamp.size() < n)
      stamp.resize(n, 0);
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    queue.clear();
    return epoch;
  }
};

thread_local ClosureScratch scratch;

// Enumerates <gens> into scratch.queue, stopping once more than `stop_above`
// elements are found.
std::size_t closure_walk(Group const &group, std::span<ElemIndex const> gens, std::size_t stop_above)
{
  auto const epoch = scratch.begin(group.size());
  auto &queue = scratch.queue;
  auto &stamp = scratch.stamp;

  ElemIndex const id = group.identity();
  queue.push_back(id);
  stamp[id] = epoch;

  // drop duplicates and the identity from the generator list
  ElemIndex gbuf[16];
  std::vector<ElemIndex> gvec;
  std::span<ElemIndex> g;
  if (gens.size() <= 16) {
    std::size_t n = 0;
    for (auto x : gens) {
      if (x != id && std::find(gbuf, gbuf + n, x) == gbuf + n)
        gbuf[n++] = x;
    }
    g = std::span<ElemIndex>(gbuf, n);
  } else {
    for (auto x : gens) {
      if (x != id)
        gvec.push_back(x);
    }
    std::sort(gvec.begin(), gvec.end());
    gvec.erase(std::unique(gvec.begin(), gvec.end()), gvec.end());
    g = gvec;
  }

  for (std::size_t head = 0; head < queue.size(); ++head) {
    ElemIndex const x = queue[head];
    for (auto s : g) {
      ElemIndex const y = group.mul(x, s);
      if (stamp[y] != epoch) {
        stamp[y] = epoch;
        queue.push_back(y);
        if (queue.size() > stop_above)
          return queue.size();
      }
    }
  }
  return queue.size();
}

void require_enumerated(Group const &group)
{
  if (!group.enumerated())
    throw SubgroupError(group.name() + " is too large for explicit subgroup computations");
}

std::vector<std::vector<Point>> compute_orbits(Group const &group, std::vector<ElemIndex> const &gens)
{
  std::uint32_t const n = group.point_count();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (auto s : gens) {
    for (Point z = 0; z < n; ++z) {
      auto a = find(z), b = find(group.act(s, z));
      if (a != b)
        parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<Point>> orbits;
  std::vector<std::int64_t> slot(n, -1);
  for (Point z = 0; z < n; ++z) {
    auto const r = find(z);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(orbits.size());
      orbits.emplace_back();
    }
    orbits[slot[r]].push_back(z);
  }
  return orbits;
}

// Greedy generating set for an explicit element list.
std::vector<ElemIndex> pick_generators(Group const &group, std::vector<ElemIndex> const &elements)
{
  std::vector<ElemIndex> gens;
  boost::dynamic_bitset<> reached(group.size());
  reached.set(group.identity());
  std::size_t count = 1;
  for (auto x : elements) {
    if (count == elements.size())
      break;
    if (reached.test(x))
      continue;
    gens.push_back(x);
    closure_walk(group, gens, group.size());
    reached.reset();
    for (auto y : scratch.queue)
      reached.set(y);
    count = scratch.queue.size();
  }
  return gens;
}

std::set<std::uint32_t> order_census(Subgroup const &h)
{
  std::set<std::uint32_t> out;
  for (auto x : h.elements())
    out.insert(h.ambient()->order_of(x));
  return out;
}

bool is_abelian(Subgroup const &h)
{
  auto const &g = *h.ambient();
  auto const &gens = h.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (g.mul(gens[i], gens[j]) != g.mul(gens[j], gens[i]))
        return false;
    }
  }
  return true;
}

bool is_dihedral(Subgroup const &h)
{
  auto const &g = *h.ambient();
  std::size_t const n = h.order();
  if (n < 4 || n % 2)
    return false;
  auto const half = static_cast<std::uint32_t>(n / 2);
  for (auto c : h.elements()) {
    if (g.order_of(c) != half)
      continue;
    // rotations: powers of c; everything else must be a reflection
    boost::dynamic_bitset<> rot(g.size());
    ElemIndex y = g.identity();
    for (std::uint32_t i = 0; i < half; ++i) {
      rot.set(y);
      y = g.mul(y, c);
    }
    for (auto x : h.elements()) {
      if (!rot.test(x) && g.order_of(x) != 2)
        return false;
    }
    return true;
  }
  return false;
}

bool orders_fit_subfield(std::set<std::uint32_t> const &census, std::uint32_t p, std::uint32_t q1)
{
  for (auto o : census) {
    if (o == 1 || o == p)
      continue;
    if ((q1 - 1) % o != 0 && (q1 + 1) % o != 0)
      return false;
  }
  return true;
}

} // namespace

Subgroup::Subgroup(GroupPtr ambient, std::vector<ElemIndex> generators, std::vector<ElemIndex> elements)
: ambient_(std::move(ambient)), generators_(std::move(generators)), elements_(std::move(elements)),
  members_(ambient_->size())
{
  std::sort(elements_.begin(), elements_.end());
  for (auto x : elements_)
    members_.set(x);
  orbits_ = compute_orbits(*ambient_, generators_);
}

std::vector<std::size_t> Subgroup::orbit_sizes() const
{
  std::vector<std::size_t> out;
  for (auto const &o : orbits_)
    out.push_back(o.size());
  return out;
}

Subgroup closure(GroupPtr const &ambient, std::span<ElemIndex const> gens)
{
  require_enumerated(*ambient);
  closure_walk(*ambient, gens, ambient->size());
  std::vector<ElemIndex> elements(scratch.queue.begin(), scratch.queue.end());
  return Subgroup(ambient, std::vector<ElemIndex>(gens.begin(), gens.end()), std::move(elements));
}

Subgroup closure(std::span<GroupElem const> gens, GroupPtr const &ambient)
{
  std::vector<ElemIndex> idx;
  for (auto const &g : gens) {
    if (!g.group()->same_as(*ambient))
      throw SubgroupError("generator " + g.to_string() + " is not in " + ambient->name());
    idx.push_back(ambient->index_of(g.matrix()));
  }
  return closure(ambient, idx);
}

std::size_t closure_order(Group const &group, std::span<ElemIndex const> gens)
{
  require_enumerated(group);
  auto const n = closure_walk(group, gens, group.size() / 2);
  return n > group.size() / 2 ? group.size() : n;
}

bool generates(Group const &group, std::span<ElemIndex const> tuple)
{
  return closure_order(group, tuple) == group.size();
}

std::optional<std::size_t> redundant_index(Group const &group, std::span<ElemIndex const> tuple)
{
  std::vector<ElemIndex> rest;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    rest.clear();
    for (std::size_t j = 0; j < tuple.size(); ++j) {
      if (j != i)
        rest.push_back(tuple[j]);
    }
    if (generates(group, rest))
      return i;
  }
  return std::nullopt;
}

bool is_redundant(Group const &group, std::span<ElemIndex const> tuple)
{
  return redundant_index(group, tuple).has_value();
}

namespace
{

std::vector<ElemIndex> indices_of(std::span<GroupElem const> tuple)
{
  if (tuple.empty())
    throw SubgroupError("empty tuple");
  auto const &group = tuple.front().group();
  std::vector<ElemIndex> idx;
  for (auto const &g : tuple) {
    if (!g.group()->same_as(*group))
      throw SubgroupError("tuple mixes elements of different groups");
    idx.push_back(group->index_of(g.matrix()));
  }
  return idx;
}

} // namespace

bool generates(std::span<GroupElem const> tuple)
{
  auto const idx = indices_of(tuple);
  return generates(*tuple.front().group(), idx);
}

bool is_redundant(std::span<GroupElem const> tuple)
{
  auto const idx = indices_of(tuple);
  return is_redundant(*tuple.front().group(), idx);
}

bool is_structural(Subgroup const &h)
{
  if (!h.is_proper())
    throw SubgroupError("is_structural needs a proper subgroup");

  for (auto const &orbit : h.orbits()) {
    if (orbit.size() <= 2)
      return true;
  }

  auto const &g = *h.ambient();
  // elements of N(T) for a non-split torus T are torus elements or involutions
  std::optional<ElemIndex> torus_elem;
  bool only_involutions = true;
  for (auto x : h.elements()) {
    auto const o = g.order_of(x);
    if (o <= 2)
      continue;
    only_involutions = false;
    if (g.type_of(x) != ElementType::non_split)
      return false;
    if (!torus_elem)
      torus_elem = x;
  }
  if (only_involutions)
    return true; // order <= 4, inside the centralizer of any of its involutions

  Group const &pgl = g.pgl();
  ElemIndex const w = g.to_pgl(*torus_elem);
  boost::dynamic_bitset<> torus(pgl.size());
  ElemIndex gen = w;
  for (ElemIndex x = 0; x < pgl.size(); ++x) {
    if (pgl.mul(x, w) == pgl.mul(w, x)) {
      torus.set(x);
      if (pgl.order_of(x) > pgl.order_of(gen))
        gen = x;
    }
  }
  for (auto s : h.generators()) {
    if (!torus.test(pgl.conj(gen, g.to_pgl(s))))
      return false;
  }
  return true;
}

std::string to_string(SubgroupClass const &c)
{
  switch (c.label) {
  case SubgroupLabel::trivial:
    return "trivial";
  case SubgroupLabel::cyclic:
    return "cyclic";
  case SubgroupLabel::elementary_abelian_p:
    return "elementary-abelian-p";
  case SubgroupLabel::borel_type:
    return "borel-type";
  case SubgroupLabel::dihedral:
    return "dihedral";
  case SubgroupLabel::a4:
    return "A4";
  case SubgroupLabel::s4:
    return "S4";
  case SubgroupLabel::a5:
    return "A5";
  case SubgroupLabel::psl_subfield:
    return "psl-subfield(" + std::to_string(c.q1) + ")";
  case SubgroupLabel::pgl_subfield:
    return "pgl-subfield(" + std::to_string(c.q1) + ")";
  case SubgroupLabel::full_group:
    return "full-group";
  case SubgroupLabel::other_structural:
    return "other-structural";
  }
  return "?";
}

SubgroupClass classify_subgroup(Subgroup const &h)
{
  auto const &g = *h.ambient();
  std::size_t const n = h.order();
  if (n == 1)
    return {SubgroupLabel::trivial};
  if (n == g.size())
    return {SubgroupLabel::full_group};

  auto const census = order_census(h);
  std::uint32_t const max_order = *census.rbegin();
  if (max_order == n)
    return {SubgroupLabel::cyclic};

  bool const abelian = is_abelian(h);
  if (abelian && census == std::set<std::uint32_t>{1, g.p()})
    return {SubgroupLabel::elementary_abelian_p};

  bool const structural = is_structural(h);
  if (structural && n % g.p() == 0) {
    for (auto const &orbit : h.orbits()) {
      if (orbit.size() == 1)
        return {SubgroupLabel::borel_type};
    }
  }

  if (is_dihedral(h))
    return {SubgroupLabel::dihedral};

  if (!abelian) {
    auto within = [&census](std::set<std::uint32_t> allowed) {
      return std::includes(allowed.begin(), allowed.end(), census.begin(), census.end());
    };
    if (n == 12 && within({1, 2, 3}))
      return {SubgroupLabel::a4};
    if (n == 24 && census == std::set<std::uint32_t>{1, 2, 3, 4})
      return {SubgroupLabel::s4};
    if (n == 60 && census == std::set<std::uint32_t>{1, 2, 3, 5})
      return {SubgroupLabel::a5};
  }

  if (structural)
    return {SubgroupLabel::other_structural};

  // q1 = p^f with f | e
  auto const &field = g.field();
  for (std::uint32_t f = 1; f <= field.e(); ++f) {
    if (field.e() % f)
      continue;
    std::uint64_t q1 = 1;
    for (std::uint32_t i = 0; i < f; ++i)
      q1 *= field.p();
    std::uint64_t const pgl_order = q1 * (q1 * q1 - 1);
    auto const q1u = static_cast<std::uint32_t>(q1);
    if (!orders_fit_subfield(census, field.p(), q1u))
      continue;
    if (n == pgl_order / 2)
      return {SubgroupLabel::psl_subfield, q1u};
    if (n == pgl_order)
      return {SubgroupLabel::pgl_subfield, q1u};
  }

  throw SubgroupError("not in Dickson table: subgroup of order " + std::to_string(n) + " in " +
                      g.name());
}

Subgroup lift_to_pgl(Subgroup const &h)
{
  auto const &g = *h.ambient();
  GroupPtr pgl = g.pgl_ptr();
  if (pgl.get() == h.ambient().get())
    return h;
  std::vector<ElemIndex> gens, elems;
  for (auto s : h.generators())
    gens.push_back(g.to_pgl(s));
  for (auto x : h.elements())
    elems.push_back(g.to_pgl(x));
  return Subgroup(pgl, std::move(gens), std::move(elems));
}

Subgroup normalizer(Subgroup const &h)
{
  Subgroup const hp = lift_to_pgl(h);
  auto const &pgl_ptr = hp.ambient();
  auto const &pgl = *pgl_ptr;

  std::vector<ElemIndex> elems;
  for (ElemIndex x = 0; x < pgl.size(); ++x) {
    bool keeps = true;
    for (auto s : hp.generators()) {
      if (!hp.contains(pgl.conj(s, x))) {
        keeps = false;
        break;
      }
    }
    if (keeps)
      elems.push_back(x);
  }
  auto gens = pick_generators(pgl, elems);
  return Subgroup(pgl_ptr, std::move(gens), std::move(elems));
}

Centralizer centralizer(Subgroup const &h, ElemIndex w)
{
  auto const &g = *h.ambient();
  std::vector<ElemIndex> elems;
  for (auto x : h.elements()) {
    if (g.mul(x, w) == g.mul(w, x))
      elems.push_back(x);
  }
  std::optional<ElemIndex> generator;
  for (auto x : elems) {
    if (g.order_of(x) == elems.size()) {
      generator = x;
      break;
    }
  }
  auto gens = generator ? std::vector<ElemIndex>{*generator} : pick_generators(g, elems);
  return {Subgroup(h.ambient(), std::move(gens), std::move(elems)), generator};
}

ElemIndex find_conjugator(Subgroup const &h, Subgroup const &k)
{
  if (h.order() != k.order())
    throw SubgroupError("find_conjugator: subgroups of orders " + std::to_string(h.order()) + " and " +
                        std::to_string(k.order()) + " cannot be conjugate");
  Subgroup const hp = lift_to_pgl(h);
  Subgroup const kp = lift_to_pgl(k);
  auto const &pgl = *hp.ambient();
  for (ElemIndex x = 0; x < pgl.size(); ++x) {
    bool maps = true;
    for (auto s : hp.generators()) {
      if (!kp.contains(pgl.conj(s, x))) {
        maps = false;
        break;
      }
    }
    if (maps)
      return x;
  }
  throw SubgroupError("no conjugating element in " + pgl.name());
}

} // namespace pralab
