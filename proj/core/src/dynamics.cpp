#include "chainscope/dynamics.hpp"

#include <algorithm>

#include "chainscope/permgroup.hpp"

namespace chainscope {

namespace {

// All maximal cylinders (up to max_level, below `from`) on which w acts as
// the exact identity, in (level, index) order. Only vertices fixed by w can
// carry such a cylinder, so the walk stays inside the fixed subtree.
void identity_cylinders_below(const AutomatonSystem& sys, const GroupWord& start_section,
                              const Vertex& from, int max_level, const Caps& caps,
                              std::vector<Cylinder>& out) {
  struct Frame {
    Vertex v;
    GroupWord sec;
  };
  std::vector<Frame> frontier{{from, start_section}};
  while (!frontier.empty()) {
    std::vector<Frame> next;
    for (const auto& f : frontier) {
      if (is_identity(sys, f.sec, caps) == Decision::Yes) {
        out.push_back(Cylinder{f.v});
        continue;  // everything below is identity too
      }
      if (f.v.level() >= max_level) continue;
      for (uint8_t i = 0; i < sys.degree().value(); ++i) {
        auto [img, sec] = step(sys, f.sec, i);
        if (img == i) next.push_back({f.v.child(i), std::move(sec)});
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace

std::vector<LqaViolation> lqa_probe(const AutomatonSystem& sys, int max_wordlen,
                                    int max_outer_level, int max_inner_level,
                                    const Caps& caps) {
  std::vector<LqaViolation> out;
  for (const GroupWord& w : reduced_words_up_to(sys, max_wordlen, caps.word_cap)) {
    if (w.is_empty()) continue;
    if (is_identity(sys, w, caps) == Decision::Yes) continue;
    for (int ul = 0; ul <= max_outer_level; ++ul) {
      for (const Vertex& uv : level_vertices(sys.degree(), ul, caps.point_cap)) {
        Cylinder outer{uv};
        // identity on an inner cylinder needs the inner root fixed, which
        // forces the outer root fixed by prefix consistency
        if (act_on_vertex(sys, w, uv) != uv) continue;
        if (is_identity_on_cylinder(sys, w, outer, caps) != Decision::No) continue;
        std::vector<Cylinder> inner;
        identity_cylinders_below(sys, section(sys, w, uv), uv, max_inner_level, caps,
                                 inner);
        std::erase_if(inner, [&](const Cylinder& c) { return c.root == uv; });
        if (!inner.empty()) out.push_back({w, outer, inner.front()});
      }
    }
  }
  return out;
}

std::variant<NonHausdorffWitness, NonHausdorffFailure> non_hausdorff_probe(
    const AutomatonSystem& sys, const GroupWord& g, const BoundaryPoint& x, int depth,
    int max_w_extra, const Caps& caps) {
  if (fixes_boundary_point(sys, g, x, caps) != Decision::Yes)
    throw domain_error("non-Hausdorff probe requires a word fixing the basepoint");
  NonHausdorffWitness witness{g, x, {}};
  for (int l = 0; l <= depth; ++l) {
    Cylinder U{prefix(x, l)};
    Decision id_on_U = is_identity_on_cylinder(sys, g, U, caps);
    if (id_on_U == Decision::Yes)
      return NonHausdorffFailure{l, "word acts as the identity on U_" + std::to_string(l)};
    if (id_on_U == Decision::Undecided)
      return NonHausdorffFailure{l, "identity decision undecided at cap on U_" +
                                        std::to_string(l)};
    // search W inside U, off the branch of x
    std::vector<Cylinder> candidates;
    GroupWord sec = section(sys, g, U.root);
    identity_cylinders_below(sys, sec, U.root, l + max_w_extra, caps, candidates);
    const Vertex on_branch_next = prefix(x, l + 1);
    std::optional<Cylinder> W;
    for (const Cylinder& c : candidates) {
      if (c.root.level() <= l) continue;  // would contain x
      if (c.root.prefix(l + 1) == on_branch_next && contains(c, x)) continue;
      if (contains(c, x)) continue;
      W = c;
      break;
    }
    if (!W)
      return NonHausdorffFailure{l, "no identity sub-cylinder off the basepoint branch "
                                    "within the level budget at U_" + std::to_string(l)};
    std::vector<uint8_t> pre = W->root.letters();
    BoundaryPoint fixed(sys.degree(), std::move(pre), {0});
    witness.levels.push_back({U, *W, std::move(fixed)});
  }
  return witness;
}

TopologicalFreenessReport topological_freeness_probe(const AutomatonSystem& sys,
                                                     int max_wordlen, int depth,
                                                     const Caps& caps) {
  TopologicalFreenessReport report{false, {}, max_wordlen, depth};
  for (const GroupWord& w : reduced_words_up_to(sys, max_wordlen, caps.word_cap)) {
    if (w.is_empty()) continue;
    if (is_identity(sys, w, caps) == Decision::Yes) continue;  // trivial element
    std::vector<Cylinder> fixed;
    identity_cylinders_below(sys, w, Vertex{}, depth, caps, fixed);
    std::erase_if(fixed, [](const Cylinder& c) { return c.root.level() == 0; });
    if (!fixed.empty()) {
      report.witnessed_not_free = true;
      report.records.push_back({w, std::move(fixed)});
    }
  }
  return report;
}

namespace {

// Union of the two generator tables; shared names must agree exactly.
AutomatonSystem merge_systems(const AutomatonSystem& a, const AutomatonSystem& b,
                              std::vector<int>& a_gens, std::vector<int>& b_gens) {
  if (a.degree() != b.degree()) throw domain_error("systems act on different trees");
  std::vector<GeneratorDef> gens = a.generators();
  a_gens.clear();
  b_gens.clear();
  for (size_t i = 0; i < gens.size(); ++i) a_gens.push_back(static_cast<int>(i));
  for (const GeneratorDef& g : b.generators()) {
    int existing = a.generator_index(g.name);
    if (existing >= 0) {
      const GeneratorDef& mine = a.generators()[static_cast<size_t>(existing)];
      if (!(mine.root == g.root))
        throw domain_error("generator " + g.name + " differs between systems");
      b_gens.push_back(existing);
    } else {
      GeneratorDef copy = g;
      // remap section factor indices from b's table into the merged table
      b_gens.push_back(static_cast<int>(gens.size()));
      gens.push_back(std::move(copy));
    }
  }
  // second pass: rewrite section words of appended generators and verify
  // that shared names also agree on their sections
  auto remap = [&](const GroupWord& w) {
    std::vector<Factor> remapped;
    for (Factor f : w.factors())
      remapped.push_back({b_gens[static_cast<size_t>(f.gen)], f.sign});
    return GroupWord(std::move(remapped));
  };
  for (size_t i = a.generators().size(); i < gens.size(); ++i)
    for (GroupWord& s : gens[i].sections) s = remap(s);
  for (size_t bi = 0; bi < b.generators().size(); ++bi) {
    int merged_idx = b_gens[bi];
    if (merged_idx < static_cast<int>(a.generators().size())) {
      const auto& mine = gens[static_cast<size_t>(merged_idx)];
      const auto& theirs = b.generators()[bi];
      for (int j = 0; j < a.degree().value(); ++j)
        if (!(mine.sections[static_cast<size_t>(j)] ==
              remap(theirs.sections[static_cast<size_t>(j)])))
          throw domain_error("generator " + theirs.name + " differs between systems");
    }
  }
  return AutomatonSystem(a.degree(), std::move(gens),
                         a.source() + "\n# merged\n" + b.source());
}

GroupWord remap_word(const GroupWord& w, const std::vector<int>& table) {
  std::vector<Factor> fs;
  for (Factor f : w.factors()) fs.push_back({table[static_cast<size_t>(f.gen)], f.sign});
  return GroupWord(std::move(fs));
}

// Words over a subset of the merged system's generators, by length.
std::vector<GroupWord> words_over(const std::vector<int>& gens, int max_len,
                                  uint64_t cap) {
  std::vector<GroupWord> out{GroupWord{}};
  size_t prev_begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const size_t begin = out.size();
    for (size_t i = prev_begin; i < begin; ++i) {
      const GroupWord base = out[i];
      for (int g : gens) {
        for (int sign : {+1, -1}) {
          if (!base.factors().empty()) {
            Factor last = base.factors().back();
            if (last.gen == g && last.sign == -sign) continue;
          }
          if (out.size() >= cap) throw resource_error("word enumeration cap exceeded");
          out.push_back(base * GroupWord::generator(g, sign));
        }
      }
    }
    prev_begin = begin;
    if (begin == out.size()) break;
  }
  return out;
}

}  // namespace

std::variant<CoeWitness, CoeCounterexample> coe_check(const AutomatonSystem& sysG,
                                                      const AutomatonSystem& sysH,
                                                      int partition_level,
                                                      int max_wordlen, const Caps& caps) {
  std::vector<int> g_map, h_map;
  AutomatonSystem merged = merge_systems(sysG, sysH, g_map, h_map);
  std::vector<GroupWord> h_words = words_over(h_map, max_wordlen, caps.word_cap);
  std::vector<GroupWord> g_words = words_over(g_map, max_wordlen, caps.word_cap);
  std::vector<Vertex> blocks = level_vertices(merged.degree(), partition_level,
                                              caps.point_cap);

  CoeWitness witness{partition_level, {}, {}, true};

  auto solve = [&](const AutomatonSystem& src, const std::vector<int>& src_map,
                   const std::vector<GroupWord>& target_words, const char* direction,
                   std::vector<CoeAssignment>& out) -> std::optional<CoeCounterexample> {
    for (size_t gi = 0; gi < src.generators().size(); ++gi) {
      GroupWord gen_word = GroupWord::generator(src_map[gi]);
      for (const Vertex& bv : blocks) {
        Cylinder block{bv};
        bool found = false;
        for (const GroupWord& h : target_words) {
          if (equal_on_cylinder(merged, gen_word, h, block, caps) == Decision::Yes) {
            out.push_back({src.generators()[gi].name, block, h});
            found = true;
            break;
          }
        }
        if (!found)
          return CoeCounterexample{direction, src.generators()[gi].name, block};
      }
    }
    return std::nullopt;
  };

  if (auto ce = solve(sysG, g_map, h_words, "alpha", witness.alpha)) return *ce;
  if (auto ce = solve(sysH, h_map, g_words, "beta", witness.beta)) return *ce;

  // partition preservation: every tested word permutes the level-p blocks
  // (LevelPermutation construction certifies prefix consistency)
  for (const GroupWord& w : g_words) {
    LevelPermutation li = level_image(merged, w, partition_level, caps);
    (void)li;
  }
  witness.partition_preserved = true;
  return witness;
}

GermReport germ_hausdorff_probe(const AutomatonSystem& sys, const GroupWord& g,
                                const BoundaryPoint& x, int depth, const Caps& caps) {
  if (fixes_boundary_point(sys, g, x, caps) != Decision::Yes)
    throw domain_error("germ probe requires a word fixing the basepoint");
  GermReport report{false, -1, {}};
  for (int l = 0; l <= depth; ++l) {
    Cylinder U{prefix(x, l)};
    if (is_identity_on_cylinder(sys, g, U, caps) == Decision::Yes) {
      report.trivial_germ = true;
      report.identity_level = l;
      return report;
    }
  }
  // nontrivial germ to this depth; look for off-branch identity cylinders
  for (int l = 0; l <= depth; ++l) {
    Cylinder U{prefix(x, l)};
    std::vector<Cylinder> candidates;
    GroupWord sec = section(sys, g, U.root);
    if (act_on_vertex(sys, g, U.root) != U.root) continue;
    identity_cylinders_below(sys, sec, U.root, l + 4, caps, candidates);
    for (const Cylinder& c : candidates) {
      if (c.root.level() > l && !contains(c, x)) {
        report.accumulating_identity_cylinders.push_back(c);
        break;
      }
    }
  }
  return report;
}

}  // namespace chainscope
