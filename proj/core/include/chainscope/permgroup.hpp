#ifndef CHAINSCOPE_PERMGROUP_HPP
#define CHAINSCOPE_PERMGROUP_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <optional>
#include <vector>

#include "chainscope/automaton.hpp"
#include "chainscope/tree.hpp"
#include "chainscope/word.hpp"

namespace chainscope {

using BigInt = boost::multiprecision::cpp_int;

// A permutation of the level-n vertices (canonical lexicographic indexing)
// that is the restriction of a tree automorphism: the image of a prefix is
// the prefix of the image. Checked on construction.
class LevelPermutation {
public:
  LevelPermutation(Degree d, int level, std::vector<uint32_t> images);
  static LevelPermutation identity(Degree d, int level);

  Degree tree_degree() const { return d_; }
  int level() const { return level_; }
  uint64_t points() const { return images_.size(); }
  uint32_t apply(uint32_t p) const { return images_[p]; }
  const std::vector<uint32_t>& images() const { return images_; }

  bool is_identity() const;
  LevelPermutation inverse() const;
  LevelPermutation operator*(const LevelPermutation& rhs) const;  // this after rhs

  // Restriction to a lower level n (prefix action).
  LevelPermutation project(int n) const;

  bool operator==(const LevelPermutation&) const = default;

  // Trusted constructor for images known to come from a tree automorphism
  // (products, inverses, restrictions of validated permutations).
  static LevelPermutation unchecked(Degree d, int level, std::vector<uint32_t> images);

private:
  LevelPermutation(Degree d, int level) : d_(d), level_(level) {}
  Degree d_;
  int level_;
  std::vector<uint32_t> images_;
};

// Level-n permutation induced by a group word. Throws resource_error when
// d^n exceeds the point cap.
LevelPermutation level_image(const AutomatonSystem& sys, const GroupWord& w, int n,
                             const Caps& caps = {});

// Permutation group on the level-n vertices with a deterministic
// base-and-strong-generating-set (base points in canonical order).
// Immutable once constructed.
class PermGroup {
public:
  // base_prefix points are forced to the front of the base, so the strong
  // generators fixing all of them generate the pointwise stabilizer.
  PermGroup(Degree d, int level, std::vector<LevelPermutation> generators,
            std::vector<uint32_t> base_prefix = {});

  static PermGroup trivial(Degree d, int level);

  Degree tree_degree() const { return d_; }
  int level() const { return level_; }
  uint64_t points() const { return points_; }
  const std::vector<LevelPermutation>& generators() const { return gens_; }

  const BigInt& order() const { return order_; }
  bool is_trivial() const { return order_ == 1; }
  bool is_transitive() const;
  bool contains(const LevelPermutation& p) const;
  bool same_group(const PermGroup& other) const;
  bool is_subgroup_of(const PermGroup& other) const;

  PermGroup point_stabilizer(uint64_t point) const;
  PermGroup point_stabilizer(const Vertex& v) const;
  PermGroup pointwise_stabilizer(const std::vector<uint64_t>& pts) const;

  // Subgroup stabilizing the level-`target_level` vertex with the given
  // index, i.e. preserving its block of level-n descendants.
  PermGroup block_stabilizer(int target_level, uint64_t vertex_index) const;

  // Image group under restriction to level n <= level().
  PermGroup project(int n) const;

  // Visits every element exactly once (BSGS transversal product order).
  // Returns false without completing when order() > cap.
  bool for_each_element(uint64_t cap,
                        const std::function<void(const LevelPermutation&)>& fn) const;

  // {x in this | x commutes with every target}; nullopt when order() > cap.
  std::optional<PermGroup> centralizer_in(const std::vector<LevelPermutation>& targets,
                                          uint64_t cap) const;

  // Deduplicated union of all strong generators (the serializable BSGS data;
  // reconstructing a group from these is cheap since they are already strong).
  std::vector<LevelPermutation> strong_generators() const;

private:
  using Perm = std::vector<uint32_t>;

  struct OrbitTree {
    std::vector<int32_t> edge;  // edge[p]: generator index into gens, -1 root, -2 absent
    std::vector<uint32_t> order;  // orbit in discovery order
    std::vector<Perm> gens, gen_inv;  // snapshot of the level's generators
  };

  void schreier_sims(size_t i);
  void rebuild_tree(size_t i);
  Perm transversal(size_t i, uint32_t p) const;
  // sift from level `from`; returns (residue, level reached)
  std::pair<Perm, size_t> strip(Perm g, size_t from) const;
  void append_base_point(uint32_t p);
  LevelPermutation wrap(Perm p) const;

  Degree d_;
  int level_;
  uint64_t points_;
  std::vector<LevelPermutation> gens_;
  std::vector<uint32_t> base_;
  std::vector<std::vector<Perm>> strong_;  // strong_[i]: gens fixing base_[0..i-1]
  std::vector<OrbitTree> trees_;
  BigInt order_;
};

// PermGroup generated by the level-n images of all system generators.
// Memoized per (system content hash, level); the front end may pre-seed the
// memo from a persistent cache via prime_group_image.
PermGroup group_image(const AutomatonSystem& sys, int n, const Caps& caps = {});

void prime_group_image(const std::string& system_hash, int n, PermGroup g);
std::optional<PermGroup> primed_group_image(const std::string& system_hash, int n);

}  // namespace chainscope

#endif
