#include "chainscope/chains.hpp"

#include <algorithm>
#include <deque>

namespace chainscope {

namespace {

uint64_t pow_u64(uint64_t b, int e) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// level-n point indices descending from the level-l vertex with given index
std::vector<uint64_t> descendant_points(Degree d, int n, int l, uint64_t vertex_index) {
  const uint64_t span = pow_u64(static_cast<uint64_t>(d.value()), n - l);
  std::vector<uint64_t> pts(span);
  for (uint64_t i = 0; i < span; ++i) pts[i] = vertex_index * span + i;
  return pts;
}

}  // namespace

std::string evidence_name(Evidence e) {
  switch (e) {
    case Evidence::ConsistentWith: return "consistent-with";
    case Evidence::Witnessed: return "witnessed";
    case Evidence::WitnessedAgainst: return "witnessed-against";
    case Evidence::Undecided: return "undecided";
  }
  return "undecided";
}

GroupChain build_chain(const AutomatonSystem& sys, const BoundaryPoint& x, int L,
                       const Caps& caps) {
  if (L < 0) throw domain_error("chain depth must be nonnegative");
  GroupChain chain{&sys, x, L, {}};
  for (int l = 0; l <= L; ++l) {
    chain.cylinders.push_back(Cylinder{prefix(x, l)});
    if (l > 0) {
      PermGroup q = group_image(sys, l, caps);
      if (!q.is_transitive())
        throw domain_error("action not minimal on tree boundary: level " +
                           std::to_string(l) + " image is intransitive");
    }
  }
  return chain;
}

std::vector<QuotientLevel> quotient_table(const GroupChain& chain, int L,
                                          const Caps& caps) {
  if (L > chain.depth) throw domain_error("quotient table depth exceeds chain depth");
  std::vector<QuotientLevel> out;
  out.reserve(static_cast<size_t>(L) + 1);
  const Degree d = chain.sys->degree();
  for (int l = 0; l <= L; ++l) {
    PermGroup q = group_image(*chain.sys, l, caps);
    uint64_t p = chain.cylinders[static_cast<size_t>(l)].root.index(d);
    PermGroup dl = q.point_stabilizer(p);
    out.push_back({l, std::move(q), std::move(dl)});
  }
  return out;
}

DiscriminantApprox discriminant_approx(const GroupChain& chain, int n,
                                       int max_lookahead, const Caps& caps) {
  if (n > max_lookahead) throw domain_error("lookahead must be >= truncation level");
  const Degree d = chain.sys->degree();
  auto isotropy_image = [&](int m) {
    PermGroup qm = group_image(*chain.sys, m, caps);
    PermGroup dm = qm.point_stabilizer(prefix(chain.basepoint, m).index(d));
    return m == n ? dm : dm.project(n);
  };
  PermGroup cur = isotropy_image(n);
  int used = n;
  bool stabilized = false;
  for (int m = n + 1; m <= max_lookahead; ++m) {
    PermGroup next = isotropy_image(m);
    used = m;
    if (next.same_group(cur)) {
      stabilized = true;
      cur = std::move(next);
      break;
    }
    cur = std::move(next);
  }
  return {n, used, std::move(cur), stabilized};
}

SubchainTable stabilizer_subchain(const GroupChain& chain, int n, int max_lookahead,
                                  const Caps& caps) {
  if (n < chain.depth)
    throw domain_error("truncation level must be at least the chain depth");
  const Degree d = chain.sys->degree();
  SubchainTable table{n, discriminant_approx(chain, n, max_lookahead, caps), {}};
  BigInt prev_order = 0;
  for (int l = 0; l <= chain.depth; ++l) {
    uint64_t v = chain.cylinders[static_cast<size_t>(l)].root.index(d);
    PermGroup k = table.discriminant.image.pointwise_stabilizer(
        descendant_points(d, n, l, v));
    if (l > 0 && k.order() < prev_order)
      throw std::logic_error("stabilizer subchain is not monotone");
    prev_order = k.order();
    table.levels.push_back({l, std::move(k), std::nullopt});
  }
  return table;
}

namespace {

// Does the group act transitively on the level-n descendants of the level-l
// vertex? (Orbit of one descendant under the generators covers all of them.)
bool transitive_on_descendants(const PermGroup& g, Degree d, int n, int l,
                               uint64_t vertex_index) {
  const uint64_t span = pow_u64(static_cast<uint64_t>(d.value()), n - l);
  const uint64_t lo = vertex_index * span;
  std::vector<char> seen(span, 0);
  std::vector<uint64_t> orbit{lo};
  seen[0] = 1;
  uint64_t count = 1;
  for (size_t head = 0; head < orbit.size() && count < span; ++head) {
    for (const auto& gen : g.generators()) {
      uint64_t img = gen.images()[orbit[head]];
      if (img < lo || img >= lo + span) return false;  // block not invariant
      if (!seen[img - lo]) {
        seen[img - lo] = 1;
        ++count;
        orbit.push_back(img);
      }
    }
  }
  return count == span;
}

}  // namespace

void centralizer_subchain(const GroupChain& chain, SubchainTable& table,
                          const Caps& caps) {
  const Degree d = chain.sys->degree();
  PermGroup qn = group_image(*chain.sys, table.truncation, caps);
  for (auto& entry : table.levels) {
    uint64_t v = chain.cylinders[static_cast<size_t>(entry.level)].root.index(d);
    PermGroup stab = qn.block_stabilizer(entry.level, v);
    entry.Z = table.discriminant.image.centralizer_in(stab.generators(), caps.enum_cap);
    if (!entry.Z && entry.K) {
      // An element commuting with a vertex stabilizer that is transitive on
      // the level-n descendants must fix every one of those points, so the
      // centralizer lies inside K and can be enumerated there instead.
      if (transitive_on_descendants(stab, d, table.truncation, entry.level, v))
        entry.Z = entry.K->centralizer_in(stab.generators(), caps.enum_cap);
    }
    if (entry.Z && entry.K) {
      if (!entry.Z->is_subgroup_of(*entry.K))
        throw std::logic_error("centralizer subchain escapes the stabilizer subchain");
    }
  }
}

KernelReport kernel_probe(const GroupChain& chain, int word_length, const Caps& caps) {
  KernelReport report{word_length, {}, {}, {}, {}};
  for (const GroupWord& w : reduced_words_up_to(*chain.sys, word_length, caps.word_cap)) {
    Decision fixes = fixes_boundary_point(*chain.sys, w, chain.basepoint, caps);
    Decision trivial = is_identity(*chain.sys, w, caps);
    if (fixes == Decision::Undecided || trivial == Decision::Undecided) {
      report.undecided.push_back(w);
      continue;
    }
    if (fixes == Decision::Yes) {
      report.fixers.push_back(w);
      if (trivial == Decision::Yes)
        report.trivial_actors.push_back(w);
      else
        report.rational.push_back(w);
    }
  }
  return report;
}

TotallyNotNormalResult totally_not_normal_check(const QuotientLevel& q,
                                                const Caps& caps) {
  TotallyNotNormalResult result{Decision::Yes, {}};
  if (q.D.is_trivial()) return result;  // vacuously true

  std::vector<LevelPermutation> d_elements;
  if (!q.D.for_each_element(caps.enum_cap, [&](const LevelPermutation& h) {
        if (!h.is_identity()) d_elements.push_back(h);
      })) {
    return {Decision::Undecided, {}};
  }
  std::vector<LevelPermutation> q_elements;
  if (!q.Q.for_each_element(caps.enum_cap, [&](const LevelPermutation& g) {
        q_elements.push_back(g);
      })) {
    return {Decision::Undecided, {}};
  }

  for (const auto& h : d_elements) {
    bool found = false;
    for (const auto& g : q_elements) {
      LevelPermutation conj = g * h * g.inverse();
      if (!q.D.contains(conj)) {
        result.witnesses.emplace_back(h, g);
        found = true;
        break;
      }
    }
    if (!found) return {Decision::No, {{h, LevelPermutation::identity(
                                              q.Q.tree_degree(), q.Q.level())}}};
  }
  return result;
}

ClassificationVerdict classify(const GroupChain& chain, const SubchainTable& table,
                               int witness_wordlen, const Caps& caps) {
  ClassificationVerdict v{};
  v.truncation = table.truncation;
  v.first_growth_level = -1;
  v.first_KZ_gap_level = -1;
  v.stable = Evidence::Undecided;
  v.algebraically_stable = Evidence::Undecided;
  v.wild_finite_type = Evidence::Undecided;
  v.wild_flat_type = Evidence::Undecided;
  v.dynamically_wild = Evidence::Undecided;

  bool any_undecided_K = false, any_undecided_Z = false;
  for (const auto& entry : table.levels) {
    v.order_K.push_back(entry.K ? entry.K->order().str() : "?");
    v.order_Z.push_back(entry.Z ? entry.Z->order().str() : "?");
    if (!entry.K) any_undecided_K = true;
    if (!entry.Z) any_undecided_Z = true;
  }

  if (chain.depth == 0) return v;  // no chain to inspect

  // strict growth levels with exact word certificates
  std::vector<int> growth_levels;
  for (size_t i = 0; i + 1 < table.levels.size(); ++i) {
    const auto& lo = table.levels[i];
    const auto& hi = table.levels[i + 1];
    if (lo.K && hi.K && lo.K->order() < hi.K->order())
      growth_levels.push_back(lo.level);
  }

  Evidence wild = Evidence::Undecided;
  if (!growth_levels.empty()) {
    // DFS over reduced words carrying the level-n image; image-level filters
    // run per node, exact cylinder certificates only for survivors.
    const AutomatonSystem& sys = *chain.sys;
    const Degree d = sys.degree();
    const int n = table.truncation;
    const uint64_t npoints = level_size(d, n, caps.point_cap);
    std::vector<std::vector<uint32_t>> moves;  // gen images and inverses at level n
    for (size_t g = 0; g < sys.generators().size(); ++g) {
      LevelPermutation p = level_image(sys, GroupWord::generator(static_cast<int>(g)), n,
                                       caps);
      moves.push_back(p.images());
      moves.push_back(p.inverse().images());
    }
    std::vector<char> pending(growth_levels.size(), 1);
    size_t remaining = growth_levels.size();
    std::vector<Factor> word_stack;
    int target_len = 0;  // iterative deepening so witnesses come out shortest
    std::function<void(const std::vector<uint32_t>&, int)> dfs =
        [&](const std::vector<uint32_t>& img, int depth) {
          if (remaining == 0) return;
          if (depth == target_len) {
            for (size_t gi = 0; gi < growth_levels.size(); ++gi) {
              if (!pending[gi]) continue;
              const int l = growth_levels[gi];
              const Cylinder& outer = chain.cylinders[static_cast<size_t>(l)];
              const Cylinder& inner = chain.cylinders[static_cast<size_t>(l + 1)];
              const uint64_t span_i = npoints / level_size(d, l + 1, caps.point_cap);
              const uint64_t lo_i = inner.root.index(d) * span_i;
              const uint64_t span_o = npoints / level_size(d, l, caps.point_cap);
              const uint64_t lo_o = outer.root.index(d) * span_o;
              bool fixes_inner = true;
              for (uint64_t p = lo_i; p < lo_i + span_i; ++p)
                if (img[p] != p) { fixes_inner = false; break; }
              if (!fixes_inner) continue;
              bool moves_outer = false;
              for (uint64_t p = lo_o; p < lo_o + span_o; ++p)
                if (img[p] != p) { moves_outer = true; break; }
              if (!moves_outer) continue;
              GroupWord w{std::vector<Factor>(word_stack)};
              if (is_identity_on_cylinder(sys, w, inner, caps) != Decision::Yes)
                continue;
              if (is_identity_on_cylinder(sys, w, outer, caps) != Decision::No)
                continue;
              LevelPermutation lp = level_image(sys, w, n, caps);
              const auto& K_lo = table.levels[static_cast<size_t>(l)].K;
              if (K_lo && K_lo->contains(lp)) continue;
              if (!table.discriminant.image.contains(lp)) continue;
              v.witnesses.push_back({l, w});
              pending[gi] = 0;
              --remaining;
              if (remaining == 0) return;
            }
          }
          if (depth == target_len) return;
          for (size_t mi = 0; mi < moves.size(); ++mi) {
            const int gen = static_cast<int>(mi / 2);
            const int sign = (mi % 2 == 0) ? +1 : -1;
            if (!word_stack.empty() && word_stack.back().gen == gen &&
                word_stack.back().sign == -sign)
              continue;  // immediate cancellation
            // appending a factor makes it the rightmost, i.e. applied first
            std::vector<uint32_t> next(npoints);
            for (uint64_t p = 0; p < npoints; ++p) next[p] = img[moves[mi][p]];
            word_stack.push_back({gen, sign});
            dfs(next, depth + 1);
            word_stack.pop_back();
            if (remaining == 0) return;
          }
        };
    std::vector<uint32_t> id(npoints);
    for (uint64_t p = 0; p < npoints; ++p) id[p] = static_cast<uint32_t>(p);
    for (target_len = 1; target_len <= witness_wordlen && remaining > 0; ++target_len)
      dfs(id, 0);
    std::sort(v.witnesses.begin(), v.witnesses.end(),
              [](const WildWitness& a, const WildWitness& b) { return a.level < b.level; });
    if (!v.witnesses.empty()) {
      wild = Evidence::Witnessed;
      v.first_growth_level = growth_levels.front();
    }
  } else if (!any_undecided_K) {
    wild = Evidence::WitnessedAgainst;  // no growth anywhere at this depth
  }

  v.stable = wild == Evidence::Witnessed      ? Evidence::WitnessedAgainst
             : wild == Evidence::WitnessedAgainst ? Evidence::ConsistentWith
                                                  : Evidence::Undecided;

  // K vs Z gap
  for (const auto& entry : table.levels) {
    if (entry.K && entry.Z && entry.Z->order() < entry.K->order()) {
      v.first_KZ_gap_level = entry.level;
      break;
    }
  }

  if (!any_undecided_Z) {
    bool z_growth = false;
    for (size_t i = 0; i + 1 < table.levels.size(); ++i)
      if (table.levels[i].Z && table.levels[i + 1].Z &&
          table.levels[i].Z->order() < table.levels[i + 1].Z->order())
        z_growth = true;
    v.algebraically_stable = z_growth ? Evidence::WitnessedAgainst
                                      : Evidence::ConsistentWith;
  }

  if (wild == Evidence::WitnessedAgainst) {
    v.wild_finite_type = Evidence::WitnessedAgainst;
    v.dynamically_wild = Evidence::WitnessedAgainst;
  } else if (wild == Evidence::Witnessed) {
    // finite-type evidence: K orders repeat at a coarser truncation
    if (table.truncation > chain.depth) {
      try {
        SubchainTable coarser =
            stabilizer_subchain(chain, table.truncation - 1,
                                std::max(table.truncation - 1, table.discriminant.lookahead),
                                caps);
        bool same = true;
        for (size_t i = 0; i < table.levels.size(); ++i) {
          if (!table.levels[i].K || !coarser.levels[i].K ||
              table.levels[i].K->order() != coarser.levels[i].K->order())
            same = false;
        }
        v.wild_finite_type = same ? Evidence::ConsistentWith : Evidence::Undecided;
      } catch (const resource_error&) {
        v.wild_finite_type = Evidence::Undecided;
      }
    }
    if (v.first_KZ_gap_level >= 0) {
      v.dynamically_wild = Evidence::Witnessed;
      v.wild_flat_type = Evidence::WitnessedAgainst;
    } else if (!any_undecided_Z && !any_undecided_K) {
      v.wild_flat_type = Evidence::ConsistentWith;
    }
  }
  if (wild == Evidence::WitnessedAgainst) v.wild_flat_type = Evidence::WitnessedAgainst;

  return v;
}

std::optional<std::vector<GroupWord>> conjugacy_witness(const AutomatonSystem& sys,
                                                        const BoundaryPoint& x,
                                                        const BoundaryPoint& y, int L,
                                                        const Caps& caps) {
  const Degree d = sys.degree();
  std::vector<GroupWord> out;
  for (int l = 0; l <= L; ++l) {
    const uint64_t npts = level_size(d, l, caps.point_cap);
    const uint64_t start = prefix(x, l).index(d);
    const uint64_t target = prefix(y, l).index(d);
    // generator images and inverses at this level
    std::vector<LevelPermutation> moves;
    std::vector<GroupWord> move_words;
    for (size_t g = 0; g < sys.generators().size(); ++g) {
      GroupWord w = GroupWord::generator(static_cast<int>(g));
      LevelPermutation p = level_image(sys, w, l, caps);
      moves.push_back(p.inverse());
      move_words.push_back(w.inverse());
      moves.push_back(std::move(p));
      move_words.push_back(std::move(w));
    }
    // BFS on the level Schreier graph
    std::vector<int64_t> parent(npts, -1);
    std::vector<size_t> via(npts, 0);
    std::deque<uint64_t> queue{start};
    parent[start] = static_cast<int64_t>(start);
    bool found = (start == target);
    while (!queue.empty() && !found) {
      uint64_t p = queue.front();
      queue.pop_front();
      for (size_t mi = 0; mi < moves.size(); ++mi) {
        uint64_t q = moves[mi].apply(static_cast<uint32_t>(p));
        if (parent[q] == -1) {
          parent[q] = static_cast<int64_t>(p);
          via[q] = mi;
          if (q == target) {
            found = true;
            break;
          }
          queue.push_back(q);
        }
      }
    }
    if (!found) return std::nullopt;
    GroupWord w;
    for (uint64_t cur = target; cur != start;
         cur = static_cast<uint64_t>(parent[cur])) {
      w = w * move_words[via[cur]];
      if (w.length() > caps.word_cap) return std::nullopt;
    }
    out.push_back(std::move(w));
  }
  return out;
}

ChainReport chain_report(const AutomatonSystem& sys, const BoundaryPoint& x, int L,
                         int truncation, int max_lookahead, int kernel_wordlen,
                         const Caps& caps) {
  GroupChain chain = build_chain(sys, x, L, caps);
  ChainReport report{sys.content_hash(), x.str(), L, truncation, {}, {truncation, {0, 0,
                     PermGroup::trivial(sys.degree(), 0), false}, {}}, {}, {}};
  report.quotients = quotient_table(chain, L, caps);
  report.subchains = stabilizer_subchain(chain, truncation, max_lookahead, caps);
  centralizer_subchain(chain, report.subchains, caps);
  report.verdict = classify(chain, report.subchains, 6, caps);
  report.kernel = kernel_probe(chain, kernel_wordlen, caps);
  return report;
}

}  // namespace chainscope
