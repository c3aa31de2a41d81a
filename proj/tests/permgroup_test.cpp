#include <random>
#include <set>

#include "chainscope/builtin.hpp"
#include "chainscope/permgroup.hpp"
#include "doctest.h"

using namespace chainscope;

namespace {

// Brute-force closure of a generating set by BFS products; the independent
// oracle for everything the BSGS engine computes.
std::set<std::vector<uint32_t>> closure(const std::vector<LevelPermutation>& gens,
                                        size_t cap = 200000) {
  std::set<std::vector<uint32_t>> seen;
  std::vector<LevelPermutation> queue;
  if (gens.empty()) return seen;
  LevelPermutation id = LevelPermutation::identity(gens[0].tree_degree(), gens[0].level());
  seen.insert(id.images());
  queue.push_back(id);
  for (size_t head = 0; head < queue.size(); ++head) {
    for (const auto& g : gens) {
      LevelPermutation next = g * queue[head];
      if (seen.insert(next.images()).second) {
        REQUIRE(seen.size() <= cap);
        queue.push_back(next);
      }
    }
  }
  return seen;
}

LevelPermutation random_level_image(std::mt19937& rng, const AutomatonSystem& sys,
                                    int level, int wordlen) {
  std::vector<Factor> fs;
  int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(wordlen));
  for (int i = 0; i < len; ++i)
    fs.push_back({static_cast<int>(rng() % sys.generators().size()),
                  rng() % 2 ? 1 : -1});
  return level_image(sys, GroupWord(std::move(fs)), level);
}

}  // namespace

TEST_CASE("level permutations must respect the tree structure") {
  Degree d(2);
  CHECK_NOTHROW(LevelPermutation(d, 2, {1, 0, 2, 3}));   // swap inside block 0
  CHECK_NOTHROW(LevelPermutation(d, 2, {2, 3, 0, 1}));   // swap the blocks
  CHECK_THROWS_AS(LevelPermutation(d, 2, {0, 2, 1, 3}), domain_error);  // crosses blocks
  CHECK_THROWS_AS(LevelPermutation(d, 2, {0, 0, 1, 3}), domain_error);  // not bijective
  CHECK(LevelPermutation::identity(d, 3).is_identity());
}

TEST_CASE("level permutation algebra") {
  Degree d(2);
  LevelPermutation a(d, 2, {2, 3, 1, 0});
  CHECK((a * a.inverse()).is_identity());
  CHECK(a.inverse().inverse() == a);
  LevelPermutation b(d, 2, {1, 0, 2, 3});
  // (a b)(x) = a(b(x))
  for (uint32_t x = 0; x < 4; ++x) CHECK((a * b).apply(x) == a.apply(b.apply(x)));
  // projection is a homomorphism
  CHECK((a * b).project(1) == a.project(1) * b.project(1));
}

TEST_CASE("level images of the odometer") {
  AutomatonSystem sys = builtin_system("odometer");
  GroupWord a = sys.parse_word("a");
  CHECK(level_image(sys, a, 1).images() == std::vector<uint32_t>{1, 0});
  CHECK(level_image(sys, GroupWord{}, 4).is_identity());

  // an 8-cycle at level 3
  LevelPermutation p = level_image(sys, a, 3);
  std::set<uint32_t> orbit;
  uint32_t x = 0;
  for (int i = 0; i < 8; ++i) {
    orbit.insert(x);
    x = p.apply(x);
  }
  CHECK(orbit.size() == 8);
  CHECK(x == 0);

  // level_image is a homomorphism and commutes with projection
  CHECK(level_image(sys, a * a, 3) == p * p);
  CHECK(p.project(1) == level_image(sys, a, 1));
}

TEST_CASE("BSGS order equals brute-force closure") {
  std::mt19937 rng(31337);
  std::vector<std::string> names{"odometer", "coe-pair", "pink2s:2", "pink:2,3"};
  for (const auto& name : names) {
    AutomatonSystem sys = builtin_system(name);
    for (int level = 1; level <= 3; ++level) {
      PermGroup g = group_image(sys, level);
      auto elems = closure(g.generators());
      CHECK(g.order() == BigInt(elems.size()));
      // membership agrees with the closure
      for (int t = 0; t < 10; ++t) {
        LevelPermutation x = random_level_image(rng, sys, level, 6);
        CHECK(g.contains(x) == (elems.count(x.images()) > 0));
      }
      for (const auto& e : elems)
        if (rng() % 4 == 0)
          CHECK(g.contains(LevelPermutation(sys.degree(), level,
                                            std::vector<uint32_t>(e))));
    }
  }
}

TEST_CASE("frozen group orders") {
  CHECK(group_image(builtin_system("odometer"), 3).order() == 8);
  CHECK(group_image(builtin_system("pink2s:2"), 2).order() == 8);
  // full level-3 binary tree automorphism group: iterated wreath product
  AutomatonSystem full = AutomatonSystem::parse(
      "degree=2\n"
      "gen s = [1,0](e,e)\n"
      "gen t = [0,1](s,e)\n"
      "gen u = [0,1](e,s)\n"
      "gen v = [0,1](t,e)\n"
      "gen w = [0,1](e,t)\n"
      "gen p = [0,1](u,e)\n"
      "gen q = [0,1](e,u)\n");
  CHECK(group_image(full, 3).order() == 128);
  CHECK(group_image(builtin_system("odometer"), 0).order() == 1);
  CHECK(PermGroup::trivial(Degree(2), 3).order() == 1);
}

TEST_CASE("transitivity") {
  CHECK(group_image(builtin_system("odometer"), 4).is_transitive());
  AutomatonSystem coe = builtin_system("coe-pair");
  PermGroup a2_only(coe.degree(), 1, {level_image(coe, coe.parse_word("a2"), 1)});
  CHECK_FALSE(a2_only.is_transitive());
  CHECK(PermGroup::trivial(Degree(2), 0).is_transitive());
}

TEST_CASE("point stabilizers against the enumeration oracle") {
  // free cyclic action: trivial stabilizer
  PermGroup cyc = group_image(builtin_system("odometer"), 3);
  CHECK(cyc.point_stabilizer(uint64_t{0}).order() == 1);

  // full level-2 group has order 8 and point stabilizers of order 2
  AutomatonSystem full2 = AutomatonSystem::parse(
      "degree=2\ngen s = [1,0](e,e)\ngen t = [0,1](s,e)\ngen u = [0,1](e,s)\n");
  PermGroup g2 = group_image(full2, 2);
  REQUIRE(g2.order() == 8);
  for (uint64_t p = 0; p < 4; ++p) {
    PermGroup stab = g2.point_stabilizer(p);
    size_t count = 0;
    g2.for_each_element(100, [&](const LevelPermutation& x) {
      if (x.apply(static_cast<uint32_t>(p)) == p) {
        ++count;
        CHECK(stab.contains(x));
      }
    });
    CHECK(stab.order() == BigInt(count));
  }

  // orbit-stabilizer: |G| = |orbit| * |stab| (transitive here)
  CHECK(g2.order() == BigInt(4) * g2.point_stabilizer(uint64_t{1}).order());
}

TEST_CASE("pointwise stabilizers against the enumeration oracle") {
  AutomatonSystem coe = builtin_system("coe-pair");
  PermGroup g(coe.degree(), 2,
              {level_image(coe, coe.parse_word("a1"), 2),
               level_image(coe, coe.parse_word("a2"), 2)});
  PermGroup stab = g.pointwise_stabilizer({2, 3});
  size_t count = 0;
  g.for_each_element(100000, [&](const LevelPermutation& x) {
    if (x.apply(2) == 2 && x.apply(3) == 3) {
      ++count;
      CHECK(stab.contains(x));
    }
  });
  CHECK(stab.order() == BigInt(count));
  CHECK(g.pointwise_stabilizer({}).same_group(g));
  CHECK(g.pointwise_stabilizer({0, 1, 2, 3}).order() == 1);
}

TEST_CASE("block stabilizer equals the filter oracle") {
  AutomatonSystem sys = builtin_system("pink2s:2");
  PermGroup g = group_image(sys, 3);
  for (int bl = 0; bl <= 2; ++bl) {
    for (uint64_t v = 0; v < (uint64_t{1} << bl); ++v) {
      PermGroup stab = g.block_stabilizer(bl, v);
      const uint64_t bsize = g.points() >> bl;
      size_t count = 0;
      g.for_each_element(1000000, [&](const LevelPermutation& x) {
        if (x.apply(static_cast<uint32_t>(v * bsize)) / bsize == v) {
          ++count;
          CHECK(stab.contains(x));
        }
      });
      CHECK(stab.order() == BigInt(count));
    }
  }
}

TEST_CASE("projection of groups") {
  AutomatonSystem sys = builtin_system("pink2s:2");
  CHECK(group_image(sys, 4).project(2).same_group(group_image(sys, 2)));
  PermGroup g = group_image(sys, 3);
  CHECK(g.project(3).same_group(g));
  CHECK(level_image(sys, sys.parse_word("a1"), 3).project(1) ==
        level_image(sys, sys.parse_word("a1"), 1));
}

TEST_CASE("subgroup membership of level images") {
  AutomatonSystem coe = builtin_system("coe-pair");
  AutomatonSystem h = builtin_system("coe-pair-H");
  PermGroup h2 = group_image(h, 2);
  PermGroup g2 = group_image(coe, 2);
  CHECK(h2.is_subgroup_of(g2));
  CHECK_FALSE(g2.is_subgroup_of(h2));
  // a2 agrees with a1^2 only blockwise, so its global level-2 image (a
  // transposition) escapes the cyclic group generated by a1's 4-cycle
  LevelPermutation a2_img = level_image(coe, coe.parse_word("a2"), 2);
  CHECK(g2.contains(a2_img));
  CHECK_FALSE(h2.contains(a2_img));
}

TEST_CASE("element enumeration") {
  PermGroup cyc = group_image(builtin_system("odometer"), 3);
  std::set<std::vector<uint32_t>> seen;
  CHECK(cyc.for_each_element(8, [&](const LevelPermutation& x) {
    seen.insert(x.images());
  }));
  CHECK(seen.size() == 8);
  CHECK_FALSE(cyc.for_each_element(7, [](const LevelPermutation&) {}));
}

TEST_CASE("centralizers") {
  Degree d(2);
  PermGroup cyc = group_image(builtin_system("odometer"), 3);
  // centralizer of identity targets is the whole group
  auto z1 = cyc.centralizer_in({LevelPermutation::identity(d, 3)}, 1000);
  REQUIRE(z1.has_value());
  CHECK(z1->same_group(cyc));
  // an abelian group centralizes its own generator
  auto z2 = cyc.centralizer_in(cyc.generators(), 1000);
  REQUIRE(z2.has_value());
  CHECK(z2->same_group(cyc));
  // cap overrun reports undecided
  CHECK_FALSE(cyc.centralizer_in(cyc.generators(), 4).has_value());

  // filter oracle on a nonabelian example
  AutomatonSystem full2 = AutomatonSystem::parse(
      "degree=2\ngen s = [1,0](e,e)\ngen t = [0,1](s,e)\ngen u = [0,1](e,s)\n");
  PermGroup g2 = group_image(full2, 2);
  std::vector<LevelPermutation> targets{level_image(full2, full2.parse_word("t"), 2)};
  auto z3 = g2.centralizer_in(targets, 1000);
  REQUIRE(z3.has_value());
  size_t count = 0;
  g2.for_each_element(100, [&](const LevelPermutation& x) {
    if (x * targets[0] == targets[0] * x) {
      ++count;
      CHECK(z3->contains(x));
    }
  });
  CHECK(z3->order() == BigInt(count));
}

TEST_CASE("prescribed base prefix yields stabilizer generators") {
  std::mt19937 rng(555);
  AutomatonSystem sys = builtin_system("pink:2,3");
  PermGroup g = group_image(sys, 3);
  for (int t = 0; t < 6; ++t) {
    uint64_t p = rng() % g.points();
    PermGroup stab = g.point_stabilizer(p);
    // every generator of the stabilizer fixes p, and the stabilizer's index
    // equals the orbit size (here: transitive, so |orbit| = 8)
    for (const auto& gen : stab.generators())
      CHECK(gen.apply(static_cast<uint32_t>(p)) == p);
    CHECK(g.order() == stab.order() * 8);
  }
}
