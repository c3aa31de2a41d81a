#ifndef CHAINSCOPE_AUTOMATON_HPP
#define CHAINSCOPE_AUTOMATON_HPP

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chainscope/tree.hpp"
#include "chainscope/word.hpp"

namespace chainscope {

// Exact decision procedures return three-valued answers: a capped search
// reports Undecided rather than guessing.
enum class Decision { Yes, No, Undecided };

inline bool decided_yes(Decision d) { return d == Decision::Yes; }
inline bool decided_no(Decision d) { return d == Decision::No; }

struct parse_error : std::runtime_error {
  int line;
  parse_error(const std::string& msg, int line_)
      : std::runtime_error(msg), line(line_) {}
};

// Permutation of the alphabet {0,...,d-1}; images[i] = p(i).
class RootPerm {
public:
  explicit RootPerm(std::vector<uint8_t> images);
  static RootPerm identity(Degree d);

  int degree() const { return static_cast<int>(images_.size()); }
  uint8_t apply(uint8_t i) const { return images_[i]; }
  uint8_t apply_inverse(uint8_t i) const { return preimages_[i]; }
  bool is_identity() const;
  const std::vector<uint8_t>& images() const { return images_; }

  bool operator==(const RootPerm&) const = default;

private:
  std::vector<uint8_t> images_;
  std::vector<uint8_t> preimages_;
};

// A named generator given by wreath recursion: a root permutation p and one
// section word per letter. It acts by  g(i·w) = p(i) · g_{p(i)}(w).
struct GeneratorDef {
  std::string name;
  RootPerm root;
  std::vector<GroupWord> sections;  // indexed by the *image* slot, d entries
};

// Caps for the exact decision procedures.
struct Caps {
  uint64_t point_cap = uint64_t{1} << 14;   // max d^n
  uint64_t closure_cap = 1'000'000;         // identity-closure word count
  uint64_t state_cap = 1'000'000;           // boundary-orbit states
  uint64_t enum_cap = 10'000'000;           // group element enumeration
  uint64_t word_cap = 200'000;              // BFS word search nodes
};

// An action on the boundary of the d-ary tree, defined by wreath recursion.
// Immutable after construction; the identity-decision memo table is a pure
// cache guarded by a mutex.
class AutomatonSystem {
public:
  AutomatonSystem(Degree d, std::vector<GeneratorDef> gens, std::string source);

  static AutomatonSystem parse(const std::string& text);

  Degree degree() const { return d_; }
  const std::vector<GeneratorDef>& generators() const { return gens_; }
  int generator_index(const std::string& name) const;  // -1 if absent
  const std::string& source() const { return source_; }
  const std::string& content_hash() const { return hash_; }

  GroupWord parse_word(const std::string& text) const;
  std::string format_word(const GroupWord& w) const;

  // memo table for is_identity; keyed by reduced word
  Decision cached_identity(const std::string& key) const;
  void cache_identity(const std::string& key, Decision d) const;
  size_t identity_cache_size() const;

private:
  Degree d_;
  std::vector<GeneratorDef> gens_;
  std::string source_;
  std::string hash_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, Decision> identity_cache_;
};

// Root permutations of all sections of one word down to a fixed depth.
// Determines the word's action on every level <= depth.
struct Portrait {
  int depth;
  // perms[l] holds, for each level-l vertex in canonical order, the images
  // vector of the section's root permutation there.
  std::vector<std::vector<std::vector<uint8_t>>> perms;

  bool all_trivial() const;
  bool operator==(const Portrait&) const = default;
};

// One step of the recursion: image letter and section word of w at letter i.
std::pair<uint8_t, GroupWord> step(const AutomatonSystem& sys, const GroupWord& w,
                                   uint8_t letter);

Vertex act_on_vertex(const AutomatonSystem& sys, const GroupWord& w, const Vertex& v);
BoundaryPoint act_on_boundary(const AutomatonSystem& sys, const GroupWord& w,
                              const BoundaryPoint& x, const Caps& caps = {});
GroupWord section(const AutomatonSystem& sys, const GroupWord& w, const Vertex& v);

// Exact word problem for the action: explores the closure of {w} under
// one-letter sections (all lengths stay <= |w|, so the closure is finite).
// Yes iff every reachable word has a trivial root permutation.
Decision is_identity(const AutomatonSystem& sys, const GroupWord& w,
                     const Caps& caps = {});

Decision is_identity_on_cylinder(const AutomatonSystem& sys, const GroupWord& w,
                                 const Cylinder& c, const Caps& caps = {});

Decision fixes_boundary_point(const AutomatonSystem& sys, const GroupWord& w,
                              const BoundaryPoint& x, const Caps& caps = {});

// Do w1 and w2 restrict to the same map on the cylinder?
Decision equal_on_cylinder(const AutomatonSystem& sys, const GroupWord& w1,
                           const GroupWord& w2, const Cylinder& c,
                           const Caps& caps = {});

Portrait portrait(const AutomatonSystem& sys, const GroupWord& w, int depth,
                  const Caps& caps = {});

// Enumerates all freely reduced words of length <= max_len in increasing
// length, lexicographic within a length. Includes the empty word first.
std::vector<GroupWord> reduced_words_up_to(const AutomatonSystem& sys, int max_len,
                                           uint64_t cap = 10'000'000);

}  // namespace chainscope

#endif
