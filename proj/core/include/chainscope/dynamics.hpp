#ifndef CHAINSCOPE_DYNAMICS_HPP
#define CHAINSCOPE_DYNAMICS_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chainscope/automaton.hpp"
#include "chainscope/tree.hpp"
#include "chainscope/word.hpp"

namespace chainscope {

// A word that is exactly the identity on an inner cylinder but provably not
// the identity on an enclosing one.
struct LqaViolation {
  GroupWord word;
  Cylinder outer;
  Cylinder inner;
};

// Exhaustive box search: reduced words up to max_wordlen, outer cylinders up
// to max_outer_level, inner cylinders strictly below the outer one up to
// max_inner_level. Empty result means "no violation found in the box".
std::vector<LqaViolation> lqa_probe(const AutomatonSystem& sys, int max_wordlen,
                                    int max_outer_level, int max_inner_level,
                                    const Caps& caps = {});

// Per-level record of the non-Hausdorff configuration at the basepoint.
struct NonHausdorffLevel {
  Cylinder U;        // level-l cylinder around x; g is certified non-identity here
  Cylinder W;        // sub-cylinder avoiding x's branch; g certified identity here
  BoundaryPoint fixed_point;  // a point of W, fixed by g
};

struct NonHausdorffWitness {
  GroupWord word;
  BoundaryPoint basepoint;
  std::vector<NonHausdorffLevel> levels;
};

struct NonHausdorffFailure {
  int failed_level;     // deepest level reached before the search failed
  std::string reason;
};

// Certifies Def-style non-Hausdorff behavior of g at x down to `depth`:
// g fixes x, is non-identity on every U_l, yet identity on some clopen
// W_l inside U_l off the branch of x. W is searched down to
// level l + max_w_extra levels.
std::variant<NonHausdorffWitness, NonHausdorffFailure> non_hausdorff_probe(
    const AutomatonSystem& sys, const GroupWord& g, const BoundaryPoint& x, int depth,
    int max_w_extra = 6, const Caps& caps = {});

struct FixedCylinderRecord {
  GroupWord word;
  std::vector<Cylinder> fixed_cylinders;  // cylinders where the word is identity
};

struct TopologicalFreenessReport {
  bool witnessed_not_free;  // some nontrivial word fixes a cylinder
  std::vector<FixedCylinderRecord> records;  // only words with nonempty lists
  int max_wordlen;
  int depth;
};

TopologicalFreenessReport topological_freeness_probe(const AutomatonSystem& sys,
                                                     int max_wordlen, int depth,
                                                     const Caps& caps = {});

// Orbit-transfer assignment for one direction of a continuous orbit
// equivalence: for each source generator and partition block, a target word
// that agrees with it exactly on the block.
struct CoeAssignment {
  std::string source_gen;
  Cylinder block;
  GroupWord target_word;
};

struct CoeWitness {
  int partition_level;
  std::vector<CoeAssignment> alpha;  // G generators expressed in H words
  std::vector<CoeAssignment> beta;   // H generators expressed in G words
  bool partition_preserved;          // blocks map to blocks for all tested words
};

struct CoeCounterexample {
  std::string direction;  // "alpha" or "beta"
  std::string generator;
  Cylinder block;
};

// Attempts the block-constant orbit-transfer maps between two systems on the
// same tree. Generator names shared by both systems must agree; target words
// are searched up to max_wordlen.
std::variant<CoeWitness, CoeCounterexample> coe_check(const AutomatonSystem& sysG,
                                                      const AutomatonSystem& sysH,
                                                      int partition_level,
                                                      int max_wordlen,
                                                      const Caps& caps = {});

struct GermReport {
  bool trivial_germ;  // g is identity on some cylinder around x (up to depth)
  int identity_level;  // the level where that happened, -1 otherwise
  // identity cylinders accumulating at x (off-branch), when the germ is
  // nontrivial: the non-Hausdorff configuration restricted to G
  std::vector<Cylinder> accumulating_identity_cylinders;
};

GermReport germ_hausdorff_probe(const AutomatonSystem& sys, const GroupWord& g,
                                const BoundaryPoint& x, int depth,
                                const Caps& caps = {});

}  // namespace chainscope

#endif
