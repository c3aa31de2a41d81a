#include "chainscope/permgroup.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_set>

namespace chainscope {

namespace {

using Perm = std::vector<uint32_t>;

Perm identity_perm(uint64_t n) {
  Perm p(n);
  for (uint64_t i = 0; i < n; ++i) p[i] = static_cast<uint32_t>(i);
  return p;
}

bool is_id(const Perm& p) {
  for (uint64_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

// a after b
Perm compose(const Perm& a, const Perm& b) {
  Perm out(b.size());
  for (uint64_t i = 0; i < b.size(); ++i) out[i] = a[b[i]];
  return out;
}

Perm inverse_perm(const Perm& p) {
  Perm out(p.size());
  for (uint64_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<uint32_t>(i);
  return out;
}

uint32_t smallest_moved(const Perm& p) {
  for (uint64_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return static_cast<uint32_t>(i);
  throw domain_error("identity permutation has no moved point");
}

uint64_t pow_u64(uint64_t b, int e) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// LevelPermutation

LevelPermutation::LevelPermutation(Degree d, int level, std::vector<uint32_t> images)
    : d_(d), level_(level), images_(std::move(images)) {
  const uint64_t n = images_.size();
  if (level < 0) throw domain_error("negative level");
  if (n != pow_u64(static_cast<uint64_t>(d.value()), level))
    throw domain_error("image array size is not d^level");
  std::vector<bool> seen(n, false);
  for (uint32_t img : images_) {
    if (img >= n || seen[img]) throw domain_error("image array is not a permutation");
    seen[img] = true;
  }
  // Prefix consistency: the induced map on each coarser level is well-defined.
  const uint64_t dd = static_cast<uint64_t>(d.value());
  std::vector<uint32_t> cur = images_;
  for (int l = level_; l >= 1; --l) {
    std::vector<uint32_t> up(cur.size() / dd);
    for (uint64_t q = 0; q < up.size(); ++q) {
      uint32_t parent = cur[q * dd] / static_cast<uint32_t>(dd);
      for (uint64_t j = 1; j < dd; ++j)
        if (cur[q * dd + j] / dd != parent)
          throw domain_error("permutation is not a tree automorphism at level " +
                             std::to_string(l));
      up[q] = parent;
    }
    cur = std::move(up);
  }
}

LevelPermutation LevelPermutation::unchecked(Degree d, int level,
                                             std::vector<uint32_t> images) {
  LevelPermutation p(d, level);
  p.images_ = std::move(images);
  return p;
}

LevelPermutation LevelPermutation::identity(Degree d, int level) {
  LevelPermutation p(d, level);
  p.images_ = identity_perm(pow_u64(static_cast<uint64_t>(d.value()), level));
  return p;
}

bool LevelPermutation::is_identity() const { return is_id(images_); }

LevelPermutation LevelPermutation::inverse() const {
  LevelPermutation p(d_, level_);
  p.images_ = inverse_perm(images_);
  return p;
}

LevelPermutation LevelPermutation::operator*(const LevelPermutation& rhs) const {
  if (level_ != rhs.level_) throw domain_error("level mismatch in product");
  LevelPermutation p(d_, level_);
  p.images_ = compose(images_, rhs.images_);
  return p;
}

LevelPermutation LevelPermutation::project(int n) const {
  if (n < 0 || n > level_) throw domain_error("projection target level out of range");
  const uint64_t q = pow_u64(static_cast<uint64_t>(d_.value()), level_ - n);
  LevelPermutation p(d_, n);
  p.images_.resize(images_.size() / q);
  for (uint64_t i = 0; i < p.images_.size(); ++i)
    p.images_[i] = static_cast<uint32_t>(images_[i * q] / q);
  return p;
}

LevelPermutation level_image(const AutomatonSystem& sys, const GroupWord& w, int n,
                             const Caps& caps) {
  const uint64_t dd = static_cast<uint64_t>(sys.degree().value());
  const uint64_t npts = level_size(sys.degree(), n, caps.point_cap);
  std::vector<uint32_t> images(npts);
  // depth-first over input vertices, carrying the section word
  struct Frame {
    GroupWord word;
    uint64_t in, out;
    int depth;
  };
  std::vector<Frame> stack{{w, 0, 0, 0}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.depth == n) {
      images[f.in] = static_cast<uint32_t>(f.out);
      continue;
    }
    for (uint64_t i = 0; i < dd; ++i) {
      auto [img, sec] = step(sys, f.word, static_cast<uint8_t>(i));
      stack.push_back({std::move(sec), f.in * dd + i, f.out * dd + img, f.depth + 1});
    }
  }
  return LevelPermutation(sys.degree(), n, std::move(images));
}

namespace {

std::mutex group_image_mutex;
std::map<std::pair<std::string, int>, PermGroup>& group_image_memo() {
  static std::map<std::pair<std::string, int>, PermGroup> memo;
  return memo;
}

}  // namespace

void prime_group_image(const std::string& system_hash, int n, PermGroup g) {
  std::lock_guard<std::mutex> lock(group_image_mutex);
  group_image_memo().insert({{system_hash, n}, std::move(g)});
}

std::optional<PermGroup> primed_group_image(const std::string& system_hash, int n) {
  std::lock_guard<std::mutex> lock(group_image_mutex);
  auto it = group_image_memo().find({system_hash, n});
  if (it == group_image_memo().end()) return std::nullopt;
  return it->second;
}

PermGroup group_image(const AutomatonSystem& sys, int n, const Caps& caps) {
  {
    std::lock_guard<std::mutex> lock(group_image_mutex);
    auto it = group_image_memo().find({sys.content_hash(), n});
    if (it != group_image_memo().end()) return it->second;
  }
  std::vector<LevelPermutation> gens;
  gens.reserve(sys.generators().size());
  for (size_t i = 0; i < sys.generators().size(); ++i)
    gens.push_back(level_image(sys, GroupWord::generator(static_cast<int>(i)), n, caps));
  PermGroup g(sys.degree(), n, std::move(gens));
  prime_group_image(sys.content_hash(), n, g);
  return g;
}

// ---------------------------------------------------------------------------
// PermGroup

PermGroup::PermGroup(Degree d, int level, std::vector<LevelPermutation> generators,
                     std::vector<uint32_t> base_prefix)
    : d_(d), level_(level), gens_(std::move(generators)) {
  points_ = pow_u64(static_cast<uint64_t>(d_.value()), level_);
  std::vector<Perm> work;
  for (const auto& g : gens_) {
    if (g.level() != level_) throw domain_error("generator level mismatch");
    if (!g.is_identity()) work.push_back(g.images());
  }

  // prescribed base points first, deduplicated
  for (uint32_t p : base_prefix) {
    if (p >= points_) throw domain_error("base point out of range");
    if (std::find(base_.begin(), base_.end(), p) == base_.end()) append_base_point(p);
  }
  strong_.assign(base_.size(), {});
  trees_.assign(base_.size(), {});
  auto fixes_prefix = [&](const Perm& g, size_t upto) {
    for (size_t i = 0; i < upto; ++i)
      if (g[base_[i]] != base_[i]) return false;
    return true;
  };
  // distribute generators over levels; extend base until every generator
  // moves some base point
  for (const Perm& g : work) {
    for (size_t i = 0; i <= base_.size(); ++i) {
      if (i == base_.size()) {
        append_base_point(smallest_moved(g));
        strong_.emplace_back();
        trees_.emplace_back();
      }
      if (fixes_prefix(g, i)) strong_[i].push_back(g);
      if (g[base_[i]] != base_[i]) break;
    }
  }

  for (size_t i = base_.size(); i-- > 0;) schreier_sims(i);

  order_ = 1;
  for (const auto& tree : trees_) order_ *= static_cast<uint64_t>(tree.order.size());
}

PermGroup PermGroup::trivial(Degree d, int level) { return PermGroup(d, level, {}); }

void PermGroup::append_base_point(uint32_t p) { base_.push_back(p); }

void PermGroup::rebuild_tree(size_t i) {
  OrbitTree& t = trees_[i];
  t.edge.assign(points_, -2);
  t.order.clear();
  t.gens = strong_[i];
  t.gen_inv.clear();
  t.gen_inv.reserve(t.gens.size());
  for (const Perm& g : t.gens) t.gen_inv.push_back(inverse_perm(g));
  uint32_t b = base_[i];
  t.edge[b] = -1;
  t.order.push_back(b);
  for (size_t head = 0; head < t.order.size(); ++head) {
    uint32_t p = t.order[head];
    for (size_t gi = 0; gi < t.gens.size(); ++gi) {
      uint32_t q = t.gens[gi][p];
      if (t.edge[q] == -2) {
        t.edge[q] = static_cast<int32_t>(gi);
        t.order.push_back(q);
      }
    }
  }
}

PermGroup::Perm PermGroup::transversal(size_t i, uint32_t p) const {
  const OrbitTree& t = trees_[i];
  std::vector<int32_t> path;
  uint32_t cur = p;
  while (t.edge[cur] != -1) {
    int32_t gi = t.edge[cur];
    path.push_back(gi);
    cur = t.gen_inv[static_cast<size_t>(gi)][cur];
  }
  Perm u = identity_perm(points_);
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    u = compose(t.gens[static_cast<size_t>(*it)], u);
  return u;
}

std::pair<PermGroup::Perm, size_t> PermGroup::strip(Perm g, size_t from) const {
  for (size_t l = from; l < base_.size(); ++l) {
    uint32_t p = g[base_[l]];
    if (trees_[l].edge[p] == -2) return {std::move(g), l};
    g = compose(inverse_perm(transversal(l, p)), g);
  }
  return {std::move(g), base_.size()};
}

void PermGroup::schreier_sims(size_t i) {
  rebuild_tree(i);
  // snapshots: recursion below may reallocate trees_/strong_ but only
  // touches levels > i
  const std::vector<uint32_t> order = trees_[i].order;
  const std::vector<Perm> gens = trees_[i].gens;
  for (size_t oi = 0; oi < order.size(); ++oi) {
    uint32_t p = order[oi];
    Perm up = transversal(i, p);
    for (size_t gi = 0; gi < gens.size(); ++gi) {
      const Perm& g = gens[gi];
      Perm uq_inv = inverse_perm(transversal(i, g[p]));
      Perm h = compose(uq_inv, compose(g, up));
      if (is_id(h)) continue;
      auto [res, j] = strip(std::move(h), i + 1);
      if (is_id(res)) continue;
      if (j == base_.size()) {
        append_base_point(smallest_moved(res));
        strong_.emplace_back();
        trees_.emplace_back();
      }
      for (size_t l = i + 1; l <= j; ++l) strong_[l].push_back(res);
      for (size_t l = j + 1; l-- > i + 1;) schreier_sims(l);
    }
  }
}

bool PermGroup::is_transitive() const {
  if (points_ == 1) return true;
  std::vector<bool> seen(points_, false);
  std::vector<uint32_t> queue{0};
  seen[0] = true;
  size_t count = 1;
  for (size_t head = 0; head < queue.size(); ++head) {
    for (const auto& g : gens_) {
      uint32_t q = g.apply(queue[head]);
      if (!seen[q]) {
        seen[q] = true;
        ++count;
        queue.push_back(q);
      }
    }
  }
  return count == points_;
}

bool PermGroup::contains(const LevelPermutation& p) const {
  if (p.level() != level_) throw domain_error("level mismatch in membership test");
  auto [res, l] = strip(p.images(), 0);
  return l == base_.size() && is_id(res);
}

bool PermGroup::same_group(const PermGroup& other) const {
  return order_ == other.order_ && is_subgroup_of(other);
}

bool PermGroup::is_subgroup_of(const PermGroup& other) const {
  for (const auto& g : gens_)
    if (!other.contains(g)) return false;
  return true;
}

LevelPermutation PermGroup::wrap(Perm p) const {
  return LevelPermutation::unchecked(d_, level_, std::move(p));
}

PermGroup PermGroup::point_stabilizer(uint64_t point) const {
  return pointwise_stabilizer({point});
}

PermGroup PermGroup::point_stabilizer(const Vertex& v) const {
  if (v.level() != level_) throw domain_error("vertex level mismatch");
  return pointwise_stabilizer({v.index(d_)});
}

PermGroup PermGroup::pointwise_stabilizer(const std::vector<uint64_t>& pts) const {
  std::vector<uint32_t> prefix;
  for (uint64_t p : pts) {
    if (p >= points_) throw domain_error("stabilizer point out of range");
    uint32_t q = static_cast<uint32_t>(p);
    if (std::find(prefix.begin(), prefix.end(), q) == prefix.end()) prefix.push_back(q);
  }
  PermGroup with_base(d_, level_, gens_, prefix);
  std::vector<LevelPermutation> stab_gens;
  if (prefix.size() <= with_base.base_.size()) {
    std::unordered_set<std::string> seen;
    size_t l = prefix.size();
    if (l < with_base.strong_.size()) {
      for (const Perm& g : with_base.strong_[l]) {
        std::string key(reinterpret_cast<const char*>(g.data()), g.size() * sizeof(uint32_t));
        if (seen.insert(key).second) stab_gens.push_back(wrap(g));
      }
    }
  }
  return PermGroup(d_, level_, std::move(stab_gens));
}

PermGroup PermGroup::block_stabilizer(int target_level, uint64_t vertex_index) const {
  if (target_level < 0 || target_level > level_)
    throw domain_error("block level out of range");
  const uint64_t bsize = points_ / pow_u64(static_cast<uint64_t>(d_.value()), target_level);
  auto block_of = [&](uint64_t p) { return p / bsize; };

  // orbit of the block with full level-n transversal permutations
  const uint64_t nblocks = points_ / bsize;
  std::vector<int64_t> pos(nblocks, -1);
  std::vector<uint64_t> orbit{vertex_index};
  std::vector<Perm> trans{identity_perm(points_)};
  pos[vertex_index] = 0;
  std::vector<Perm> raw_gens;
  for (const auto& g : gens_) raw_gens.push_back(g.images());

  std::vector<Perm> schreier;
  std::unordered_set<std::string> seen;
  auto add_schreier = [&](Perm p) {
    if (is_id(p)) return;
    std::string key(reinterpret_cast<const char*>(p.data()), p.size() * sizeof(uint32_t));
    if (seen.insert(key).second) schreier.push_back(std::move(p));
  };

  for (size_t head = 0; head < orbit.size(); ++head) {
    for (const Perm& g : raw_gens) {
      uint64_t img = block_of(g[orbit[head] * bsize]);
      Perm moved = compose(g, trans[head]);
      if (pos[img] == -1) {
        pos[img] = static_cast<int64_t>(orbit.size());
        orbit.push_back(img);
        trans.push_back(std::move(moved));
      } else {
        add_schreier(compose(inverse_perm(trans[static_cast<size_t>(pos[img])]), moved));
      }
    }
  }

  std::vector<LevelPermutation> stab_gens;
  stab_gens.reserve(schreier.size());
  for (Perm& p : schreier) stab_gens.push_back(wrap(std::move(p)));
  return PermGroup(d_, level_, std::move(stab_gens));
}

PermGroup PermGroup::project(int n) const {
  std::vector<LevelPermutation> gens;
  gens.reserve(gens_.size());
  for (const auto& g : gens_) gens.push_back(g.project(n));
  return PermGroup(d_, n, std::move(gens));
}

bool PermGroup::for_each_element(
    uint64_t cap, const std::function<void(const LevelPermutation&)>& fn) const {
  if (order_ > cap) return false;
  // product of transversals, outermost level first
  std::function<void(size_t, const Perm&)> rec = [&](size_t i, const Perm& acc) {
    if (i == base_.size()) {
      fn(wrap(acc));
      return;
    }
    for (uint32_t p : trees_[i].order) rec(i + 1, compose(acc, transversal(i, p)));
  };
  rec(0, identity_perm(points_));
  return true;
}

std::optional<PermGroup> PermGroup::centralizer_in(
    const std::vector<LevelPermutation>& targets, uint64_t cap) const {
  if (order_ > cap) return std::nullopt;
  // drop redundant targets: the centralizer only depends on the generated group
  std::vector<LevelPermutation> irred;
  PermGroup span = PermGroup::trivial(d_, level_);
  for (const auto& t : targets) {
    if (t.level() != level_) throw domain_error("centralizer target level mismatch");
    if (span.contains(t)) continue;
    irred.push_back(t);
    span = PermGroup(d_, level_, irred);
  }
  std::vector<Perm> traw;
  traw.reserve(irred.size());
  for (const auto& t : irred) traw.push_back(t.images());
  PermGroup result = PermGroup::trivial(d_, level_);
  std::vector<LevelPermutation> found;
  for_each_element(cap, [&](const LevelPermutation& x) {
    const Perm& a = x.images();
    for (const Perm& b : traw)
      for (uint64_t i = 0; i < points_; ++i)
        if (a[b[i]] != b[a[i]]) return;
    if (!result.contains(x)) {
      found.push_back(x);
      result = PermGroup(d_, level_, found);
    }
  });
  return result;
}

std::vector<LevelPermutation> PermGroup::strong_generators() const {
  std::vector<LevelPermutation> out;
  std::unordered_set<std::string> seen;
  for (const auto& layer : strong_) {
    for (const Perm& g : layer) {
      std::string key(reinterpret_cast<const char*>(g.data()),
                      g.size() * sizeof(uint32_t));
      if (seen.insert(key).second) out.push_back(wrap(g));
    }
  }
  return out;
}

}  // namespace chainscope
