#ifndef CHAINSCOPE_CHAINS_HPP
#define CHAINSCOPE_CHAINS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainscope/automaton.hpp"
#include "chainscope/permgroup.hpp"
#include "chainscope/tree.hpp"
#include "chainscope/word.hpp"

namespace chainscope {

// Vertex-stabilizer chain along the basepoint path: level l stands for the
// stabilizer of prefix(x,l) and the cylinder there. Requires the action to be
// transitive on every level up to L.
struct GroupChain {
  const AutomatonSystem* sys;
  BoundaryPoint basepoint;
  int depth;                       // L
  std::vector<Cylinder> cylinders;  // cylinders[l] at prefix(x,l), l = 0..L
};

GroupChain build_chain(const AutomatonSystem& sys, const BoundaryPoint& x, int L,
                       const Caps& caps = {});

// Level image Q_l and the basepoint-prefix stabilizer D_l inside it.
struct QuotientLevel {
  int level;
  PermGroup Q;
  PermGroup D;
};

std::vector<QuotientLevel> quotient_table(const GroupChain& chain, int L,
                                          const Caps& caps = {});

// Image of the deeper-level isotropy groups at truncation level n:
// pi_{m->n}(D_m) for m = n .. (early stop on two-step stabilization).
struct DiscriminantApprox {
  int level;          // n
  int lookahead;      // last m actually used
  PermGroup image;    // pi_{m->n}(D_m)
  bool stabilized;    // consecutive images coincided before the cap
};

DiscriminantApprox discriminant_approx(const GroupChain& chain, int n,
                                       int max_lookahead, const Caps& caps = {});

// One level of the stabilizer/centralizer subchain tables at truncation n.
struct SubchainLevel {
  int level;                     // l
  std::optional<PermGroup> K;    // nullopt = undecided at cap
  std::optional<PermGroup> Z;
};

struct SubchainTable {
  int truncation;  // n
  DiscriminantApprox discriminant;
  std::vector<SubchainLevel> levels;  // l = 0..L
};

// K part: elements of the discriminant approximation acting trivially on the
// level-n descendants of prefix(x,l).
SubchainTable stabilizer_subchain(const GroupChain& chain, int n, int max_lookahead,
                                  const Caps& caps = {});

// Fills in the Z part: centralizer of Stab_{Q_n}(prefix(x,l)) inside the
// discriminant approximation. Undecided entries stay unset.
void centralizer_subchain(const GroupChain& chain, SubchainTable& table,
                          const Caps& caps = {});

// Word-length-bounded sample of the chain kernel and its normal core.
struct KernelReport {
  int word_length;
  std::vector<GroupWord> fixers;          // fix the basepoint exactly
  std::vector<GroupWord> trivial_actors;  // provably the identity map
  std::vector<GroupWord> rational;        // fixers that are provably non-identity
  std::vector<GroupWord> undecided;       // caps hit
};

KernelReport kernel_probe(const GroupChain& chain, int word_length,
                          const Caps& caps = {});

// For every nontrivial h in D: a conjugator g in Q with g h g^{-1} outside D.
struct TotallyNotNormalResult {
  Decision verdict;
  // witness pairs (h, g); empty when D is trivial
  std::vector<std::pair<LevelPermutation, LevelPermutation>> witnesses;
};

TotallyNotNormalResult totally_not_normal_check(const QuotientLevel& q,
                                                const Caps& caps = {});

enum class Evidence { ConsistentWith, Witnessed, WitnessedAgainst, Undecided };

std::string evidence_name(Evidence e);

// A strict-growth certificate: a word that provably acts as the identity on
// the inner cylinder but not on the outer one.
struct WildWitness {
  int level;  // outer cylinder level l; inner is l+1
  GroupWord word;
};

struct ClassificationVerdict {
  int truncation;
  Evidence stable;
  Evidence algebraically_stable;
  Evidence wild_finite_type;
  Evidence wild_flat_type;
  Evidence dynamically_wild;
  std::vector<std::string> order_K;   // decimal strings per level
  std::vector<std::string> order_Z;
  int first_growth_level;             // -1 if none
  int first_KZ_gap_level;             // -1 if none
  std::vector<WildWitness> witnesses;
};

ClassificationVerdict classify(const GroupChain& chain, const SubchainTable& table,
                               int witness_wordlen = 6, const Caps& caps = {});

// Per-level words w_l with w_l(prefix(x,l)) = prefix(y,l), found by BFS on
// the level Schreier graph. Empty optional only on resource exhaustion.
std::optional<std::vector<GroupWord>> conjugacy_witness(const AutomatonSystem& sys,
                                                        const BoundaryPoint& x,
                                                        const BoundaryPoint& y, int L,
                                                        const Caps& caps = {});

// Full report assembly (drives everything above); serialized by the CLI.
struct ChainReport {
  std::string system_hash;
  std::string basepoint;
  int depth;
  int truncation;
  std::vector<QuotientLevel> quotients;
  SubchainTable subchains;
  ClassificationVerdict verdict;
  KernelReport kernel;
};

ChainReport chain_report(const AutomatonSystem& sys, const BoundaryPoint& x, int L,
                         int truncation, int max_lookahead, int kernel_wordlen = 4,
                         const Caps& caps = {});

}  // namespace chainscope

#endif
