#include <random>

#include "chainscope/builtin.hpp"
#include "chainscope/chains.hpp"
#include "doctest.h"

using namespace chainscope;

TEST_CASE("chain construction") {
  AutomatonSystem sys = builtin_system("odometer");
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), ".(1)");
  GroupChain chain = build_chain(sys, x, 5);
  CHECK(chain.depth == 5);
  REQUIRE(chain.cylinders.size() == 6);
  CHECK(chain.cylinders[0].root.level() == 0);
  CHECK(chain.cylinders[3].root.str() == "111");
  CHECK_NOTHROW(build_chain(sys, x, 0));

  // an intransitive action is rejected with a minimality diagnostic
  AutomatonSystem fix = AutomatonSystem::parse("degree=2\ngen a = [0,1](a,e)\n");
  CHECK_THROWS_WITH_AS(build_chain(fix, x, 2),
                       doctest::Contains("not minimal"), domain_error);
}

TEST_CASE("odometer quotient table") {
  AutomatonSystem sys = builtin_system("odometer");
  GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 6);
  auto table = quotient_table(chain, 6);
  REQUIRE(table.size() == 7);
  for (int l = 0; l <= 6; ++l) {
    CHECK(table[static_cast<size_t>(l)].Q.order() == BigInt(1) << l);
    CHECK(table[static_cast<size_t>(l)].D.order() == 1);
  }
}

TEST_CASE("quotient and isotropy orders for pink2s(2)") {
  AutomatonSystem sys = builtin_system("pink2s:2");
  GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), "11.(0)"), 3);
  auto table = quotient_table(chain, 3);
  CHECK(table[2].Q.order() == 8);
  CHECK(table[2].D.order() == 2);
  CHECK(table[3].Q.order() == 128);
  CHECK(table[3].D.order() == 16);
  // orbit-stabilizer at every level (the action is level-transitive)
  for (int l = 0; l <= 3; ++l)
    CHECK(table[static_cast<size_t>(l)].Q.order() ==
          table[static_cast<size_t>(l)].D.order() * (BigInt(1) << l));
}

TEST_CASE("discriminant approximation") {
  AutomatonSystem sys = builtin_system("odometer");
  GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 4);
  for (int n = 0; n <= 4; ++n) {
    DiscriminantApprox disc = discriminant_approx(chain, n, n + 4);
    CHECK(disc.image.order() == 1);
    CHECK(disc.stabilized);
  }
  CHECK_THROWS_AS(discriminant_approx(chain, 4, 3), domain_error);

  // the deeper-stabilizer images shrink before stabilizing for coe-pair
  AutomatonSystem coe = builtin_system("coe-pair");
  GroupChain cchain = build_chain(coe, BoundaryPoint::parse(coe.degree(), ".(1)"), 4);
  DiscriminantApprox cdisc = discriminant_approx(cchain, 4, 8);
  CHECK(cdisc.image.order() == 8);
  // the level-4 isotropy D_4 itself is bigger: lookahead matters
  auto ctable = quotient_table(cchain, 4);
  CHECK(ctable[4].D.order() == 8);
}

TEST_CASE("stabilizer subchain of the odometer is trivial") {
  AutomatonSystem sys = builtin_system("odometer");
  GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 6);
  SubchainTable table = stabilizer_subchain(chain, 6, 10);
  for (const auto& e : table.levels) {
    REQUIRE(e.K.has_value());
    CHECK(e.K->order() == 1);
  }
  centralizer_subchain(chain, table);
  for (const auto& e : table.levels) {
    REQUIRE(e.Z.has_value());
    CHECK(e.Z->order() == 1);
  }
}

TEST_CASE("stabilizer subchain of pink2s(2) against the filter oracle") {
  AutomatonSystem sys = builtin_system("pink2s:2");
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), "11.(0)");
  GroupChain chain = build_chain(sys, x, 4);
  SubchainTable table = stabilizer_subchain(chain, 4, 8);

  CHECK(table.discriminant.image.order() == 2048);
  CHECK(table.discriminant.stabilized);
  std::vector<std::string> expected_K{"1", "128", "1024", "2048", "2048"};
  for (size_t l = 0; l < expected_K.size(); ++l) {
    REQUIRE(table.levels[l].K.has_value());
    CHECK(table.levels[l].K->order().str() == expected_K[l]);
  }

  // independent oracle: filter the discriminant elements that fix the
  // level-4 descendants of prefix(x, l)
  for (int l = 0; l <= 4; ++l) {
    uint64_t span = uint64_t{1} << (4 - l);
    uint64_t lo = prefix(x, l).index(sys.degree()) * span;
    size_t count = 0;
    table.discriminant.image.for_each_element(4096, [&](const LevelPermutation& g) {
      for (uint64_t p = lo; p < lo + span; ++p)
        if (g.apply(static_cast<uint32_t>(p)) != p) return;
      ++count;
    });
    CHECK(table.levels[static_cast<size_t>(l)].K->order() == BigInt(count));
  }

  // monotone: K_l <= K_{l+1}
  for (size_t l = 0; l + 1 < table.levels.size(); ++l)
    CHECK(table.levels[l].K->is_subgroup_of(*table.levels[l + 1].K));

  // a2, a3, a4 lie in K_l for l >= 2
  for (int l = 2; l <= 4; ++l)
    for (const char* name : {"a2", "a3", "a4"})
      CHECK(table.levels[static_cast<size_t>(l)].K->contains(
          level_image(sys, sys.parse_word(name), 4)));
}

TEST_CASE("centralizer subchain and the K/Z gap") {
  AutomatonSystem sys = builtin_system("pink2s:2");
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), "11.(0)");
  GroupChain chain = build_chain(sys, x, 4);
  SubchainTable table = stabilizer_subchain(chain, 4, 8);
  centralizer_subchain(chain, table);
  std::vector<std::string> expected_Z{"1", "2", "4", "8", "8"};
  for (size_t l = 0; l < expected_Z.size(); ++l) {
    REQUIRE(table.levels[l].Z.has_value());
    CHECK(table.levels[l].Z->order().str() == expected_Z[l]);
    // containment Z <= K at every computed level
    CHECK(table.levels[l].Z->is_subgroup_of(*table.levels[l].K));
  }

  // oracle: filter the discriminant for elements commuting with the full
  // vertex stabilizer in Q_4
  PermGroup q4 = group_image(sys, 4);
  for (int l = 0; l <= 4; ++l) {
    PermGroup stab = q4.block_stabilizer(l, prefix(x, l).index(sys.degree()));
    size_t count = 0;
    table.discriminant.image.for_each_element(4096, [&](const LevelPermutation& g) {
      for (const auto& s : stab.generators())
        if (!(g * s == s * g)) return;
      ++count;
    });
    CHECK(table.levels[static_cast<size_t>(l)].Z->order() == BigInt(count));
  }
}

TEST_CASE("kernel probe") {
  AutomatonSystem sys = builtin_system("odometer");
  GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 4);
  KernelReport report = kernel_probe(chain, 4);
  // the free Z-action: only the empty word fixes the basepoint
  REQUIRE(report.fixers.size() == 1);
  CHECK(report.fixers[0].is_empty());
  CHECK(report.rational.empty());
  CHECK(report.undecided.empty());

  AutomatonSystem coe = builtin_system("coe-pair");
  GroupChain cchain = build_chain(coe, BoundaryPoint::parse(coe.degree(), ".(1)"), 4);
  KernelReport crep = kernel_probe(cchain, 2);
  // a2 fixes .(1) but provably acts nontrivially: a G-rational point
  bool a2_rational = false;
  for (const auto& w : crep.rational)
    if (w == coe.parse_word("a2")) a2_rational = true;
  CHECK(a2_rational);
  for (const auto& w : crep.trivial_actors) CHECK(is_identity(coe, w) == Decision::Yes);
}

TEST_CASE("totally-not-normal checks") {
  // trivial D: vacuously true
  AutomatonSystem sys = builtin_system("odometer");
  GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 3);
  auto q = quotient_table(chain, 3);
  CHECK(totally_not_normal_check(q[3]).verdict == Decision::Yes);

  // full level-2 group with a point stabilizer: conjugating moves the fixed
  // point, so no nontrivial element of D is normal-compatible
  AutomatonSystem full2 = AutomatonSystem::parse(
      "degree=2\ngen s = [1,0](e,e)\ngen t = [0,1](s,e)\ngen u = [0,1](e,s)\n");
  PermGroup g2 = group_image(full2, 2);
  QuotientLevel lvl{2, g2, g2.point_stabilizer(uint64_t{0})};
  auto res = totally_not_normal_check(lvl);
  CHECK(res.verdict == Decision::Yes);
  CHECK_FALSE(res.witnesses.empty());
  for (const auto& [h, g] : res.witnesses) {
    CHECK(lvl.D.contains(h));
    CHECK_FALSE(lvl.D.contains(g * h * g.inverse()));
  }

  // pink2s(2) at level 3
  AutomatonSystem p = builtin_system("pink2s:2");
  GroupChain pchain = build_chain(p, BoundaryPoint::parse(p.degree(), "11.(0)"), 3);
  auto pq = quotient_table(pchain, 3);
  auto pres = totally_not_normal_check(pq[3]);
  CHECK(pres.verdict == Decision::Yes);
  CHECK_FALSE(pres.witnesses.empty());
}

TEST_CASE("classification verdicts") {
  // odometer: stable
  {
    AutomatonSystem sys = builtin_system("odometer");
    GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 6);
    SubchainTable table = stabilizer_subchain(chain, 6, 10);
    centralizer_subchain(chain, table);
    ClassificationVerdict v = classify(chain, table);
    CHECK(v.stable == Evidence::ConsistentWith);
    CHECK(v.dynamically_wild == Evidence::WitnessedAgainst);
    CHECK(v.witnesses.empty());
    CHECK(v.first_growth_level == -1);
  }
  // pink2s(2): wild and dynamically wild, with verified certificates
  {
    AutomatonSystem sys = builtin_system("pink2s:2");
    GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), "11.(0)"), 4);
    SubchainTable table = stabilizer_subchain(chain, 4, 8);
    centralizer_subchain(chain, table);
    ClassificationVerdict v = classify(chain, table, 7);
    CHECK(v.stable == Evidence::WitnessedAgainst);
    CHECK(v.dynamically_wild == Evidence::Witnessed);
    CHECK(v.first_KZ_gap_level == 1);
    REQUIRE(!v.witnesses.empty());
    for (const auto& w : v.witnesses) {
      Cylinder inner = chain.cylinders[static_cast<size_t>(w.level + 1)];
      Cylinder outer = chain.cylinders[static_cast<size_t>(w.level)];
      CHECK(is_identity_on_cylinder(sys, w.word, inner) == Decision::Yes);
      CHECK(is_identity_on_cylinder(sys, w.word, outer) == Decision::No);
    }
  }
  // depth 0: nothing to inspect
  {
    AutomatonSystem sys = builtin_system("odometer");
    GroupChain chain = build_chain(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 0);
    SubchainTable table = stabilizer_subchain(chain, 0, 4);
    ClassificationVerdict v = classify(chain, table);
    CHECK(v.stable == Evidence::Undecided);
    CHECK(v.dynamically_wild == Evidence::Undecided);
  }
}

TEST_CASE("conjugacy witnesses") {
  AutomatonSystem sys = builtin_system("odometer");
  Degree d = sys.degree();
  BoundaryPoint x = BoundaryPoint::parse(d, ".(1)");
  BoundaryPoint y = BoundaryPoint::parse(d, ".(0)");
  auto ws = conjugacy_witness(sys, x, y, 5);
  REQUIRE(ws.has_value());
  REQUIRE(ws->size() == 6);
  for (int l = 0; l <= 5; ++l)
    CHECK(act_on_vertex(sys, (*ws)[static_cast<size_t>(l)], prefix(x, l)) ==
          prefix(y, l));
  // x = y gives empty words
  auto same = conjugacy_witness(sys, x, x, 4);
  REQUIRE(same.has_value());
  for (const auto& w : *same) CHECK(w.is_empty());

  // pink2s(2): transport 11.(0) to .(0)
  AutomatonSystem p = builtin_system("pink2s:2");
  BoundaryPoint px = BoundaryPoint::parse(d, "11.(0)");
  BoundaryPoint py = BoundaryPoint::parse(d, ".(0)");
  auto pws = conjugacy_witness(p, px, py, 3);
  REQUIRE(pws.has_value());
  for (int l = 0; l <= 3; ++l)
    CHECK(act_on_vertex(p, (*pws)[static_cast<size_t>(l)], prefix(px, l)) ==
          prefix(py, l));
}

TEST_CASE("full chain report") {
  AutomatonSystem sys = builtin_system("odometer");
  ChainReport r = chain_report(sys, BoundaryPoint::parse(sys.degree(), ".(1)"), 5, 5, 8);
  CHECK(r.system_hash == sys.content_hash());
  CHECK(r.depth == 5);
  CHECK(r.quotients.size() == 6);
  CHECK(r.subchains.levels.size() == 6);
  CHECK(r.verdict.stable == Evidence::ConsistentWith);
  CHECK(r.kernel.fixers.size() == 1);
}
