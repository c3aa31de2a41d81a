// chainscope: group-chain invariants of tree-boundary actions given by
// wreath recursion. Subcommands: eval, chain, probe, cache.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chainscope/builtin.hpp"
#include "chainscope/chains.hpp"
#include "chainscope/dynamics.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace chainscope;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kParseError = 2;
constexpr int kResourceCap = 3;
constexpr int kPrecondition = 4;

struct Options {
  std::string format = "json";
  std::string cache_dir;
  Caps caps;
};

std::string default_cache_dir() {
  if (const char* env = std::getenv("CHAINSCOPE_CACHE_DIR")) return env;
  if (const char* home = std::getenv("HOME"))
    return (fs::path(home) / ".cache" / "chainscope").string();
  return ".chainscope-cache";
}

AutomatonSystem load_system(const std::string& arg) {
  if (is_builtin_name(arg)) return builtin_system(arg);
  std::ifstream in(arg);
  if (!in) throw parse_error("no builtin or readable file named '" + arg + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return AutomatonSystem::parse(buf.str());
}

void emit(const json& j, const Options& opt, const std::string& text_form) {
  if (opt.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text_form;
}

// --- persistent level-group cache -------------------------------------------

fs::path cache_file(const std::string& dir, const std::string& hash, int level) {
  return fs::path(dir) / (hash + ".L" + std::to_string(level) + ".json");
}

void cache_load(const std::string& dir, const AutomatonSystem& sys, int max_level) {
  for (int l = 0; l <= max_level; ++l) {
    fs::path f = cache_file(dir, sys.content_hash(), l);
    std::ifstream in(f);
    if (!in) continue;
    try {
      json j = json::parse(in);
      std::vector<LevelPermutation> gens;
      for (const auto& arr : j.at("strong"))
        gens.push_back(LevelPermutation(sys.degree(), l,
                                        arr.get<std::vector<uint32_t>>()));
      PermGroup g(sys.degree(), l, std::move(gens));
      if (g.order().str() != j.at("order").get<std::string>()) continue;  // stale
      prime_group_image(sys.content_hash(), l, std::move(g));
    } catch (...) {
      // unreadable cache entries are ignored, never fatal
    }
  }
}

void cache_store(const std::string& dir, const AutomatonSystem& sys, int max_level) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return;
  for (int l = 0; l <= max_level; ++l) {
    auto g = primed_group_image(sys.content_hash(), l);
    if (!g) continue;
    fs::path f = cache_file(dir, sys.content_hash(), l);
    if (fs::exists(f)) continue;
    json j;
    j["degree"] = sys.degree().value();
    j["level"] = l;
    j["order"] = g->order().str();
    json strong = json::array();
    for (const auto& p : g->strong_generators()) strong.push_back(p.images());
    j["strong"] = std::move(strong);
    // atomic publish: write a temp file, then rename into place
    fs::path tmp = f;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp);
      out << j.dump() << "\n";
    }
    fs::rename(tmp, f, ec);
    if (ec) fs::remove(tmp, ec);
  }
}

// --- subcommand bodies --------------------------------------------------------

int run_eval(const Options& opt, const std::string& system, const std::string& word,
             const std::string& point) {
  AutomatonSystem sys = load_system(system);
  GroupWord w = sys.parse_word(word);
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), point);
  BoundaryPoint y = act_on_boundary(sys, w, x, opt.caps);
  json j;
  j["word"] = sys.format_word(w);
  j["point"] = x.str();
  j["result"] = y.str();
  emit(j, opt, y.str() + "\n");
  return kOk;
}

json verdicts_json(const ClassificationVerdict& v) {
  json j;
  j["stable"] = evidence_name(v.stable);
  j["algebraically_stable"] = evidence_name(v.algebraically_stable);
  j["wild_finite_type"] = evidence_name(v.wild_finite_type);
  j["wild_flat_type"] = evidence_name(v.wild_flat_type);
  j["dynamically_wild"] = evidence_name(v.dynamically_wild);
  j["first_growth_level"] = v.first_growth_level;
  j["first_KZ_gap_level"] = v.first_KZ_gap_level;
  return j;
}

int run_chain(const Options& opt, const std::string& system, const std::string& point,
              int depth, int truncation, int lookahead, int wordlen,
              int kernel_wordlen) {
  AutomatonSystem sys = load_system(system);
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), point);
  if (truncation < 0) truncation = depth;
  const int max_lookahead = truncation + lookahead;
  if (!opt.cache_dir.empty()) cache_load(opt.cache_dir, sys, max_lookahead);

  GroupChain chain = build_chain(sys, x, depth, opt.caps);
  ChainReport report{sys.content_hash(), x.str(), depth, truncation, {},
                     {truncation, {0, 0, PermGroup::trivial(sys.degree(), 0), false},
                      {}}, {}, {}};
  report.quotients = quotient_table(chain, depth, opt.caps);
  report.subchains = stabilizer_subchain(chain, truncation, max_lookahead, opt.caps);
  centralizer_subchain(chain, report.subchains, opt.caps);
  report.verdict = classify(chain, report.subchains, wordlen, opt.caps);
  report.kernel = kernel_probe(chain, kernel_wordlen, opt.caps);

  if (!opt.cache_dir.empty()) cache_store(opt.cache_dir, sys, max_lookahead);

  json j;
  j["system_hash"] = report.system_hash;
  j["basepoint"] = report.basepoint;
  j["depth"] = report.depth;
  j["truncation"] = report.truncation;
  {
    json d;
    d["level"] = report.subchains.discriminant.level;
    d["lookahead"] = report.subchains.discriminant.lookahead;
    d["stabilized"] = report.subchains.discriminant.stabilized;
    d["order"] = report.subchains.discriminant.image.order().str();
    j["discriminant"] = std::move(d);
  }
  json levels = json::array();
  std::ostringstream text;
  text << "chain report for " << point << " depth " << depth << " truncation "
       << truncation << "\n";
  text << "  l  |Q_l|  |D_l|  |K_l|  |Z_l|  flags\n";
  for (int l = 0; l <= depth; ++l) {
    const auto& q = report.quotients[static_cast<size_t>(l)];
    const auto& s = report.subchains.levels[static_cast<size_t>(l)];
    json e;
    e["level"] = l;
    e["orderQ"] = q.Q.order().str();
    e["orderD"] = q.D.order().str();
    e["orderK"] = s.K ? json(s.K->order().str()) : json(nullptr);
    e["orderZ"] = s.Z ? json(s.Z->order().str()) : json(nullptr);
    json flags;
    flags["transitive"] = q.Q.is_transitive();
    bool growth = l > 0 && s.K && report.subchains.levels[static_cast<size_t>(l - 1)].K &&
                  report.subchains.levels[static_cast<size_t>(l - 1)].K->order() <
                      s.K->order();
    flags["K_growth"] = growth;
    flags["KZ_gap"] = s.K && s.Z && s.Z->order() < s.K->order();
    e["flags"] = std::move(flags);
    levels.push_back(std::move(e));
    text << "  " << l << "  " << q.Q.order() << "  " << q.D.order() << "  "
         << (s.K ? s.K->order().str() : "?") << "  "
         << (s.Z ? s.Z->order().str() : "?") << (growth ? "  K-growth" : "") << "\n";
  }
  j["levels"] = std::move(levels);
  j["verdicts"] = verdicts_json(report.verdict);
  json witnesses = json::array();
  for (const auto& w : report.verdict.witnesses) {
    json e;
    e["level"] = w.level;
    e["word"] = sys.format_word(w.word);
    witnesses.push_back(std::move(e));
    text << "  witness L" << w.level << ": " << sys.format_word(w.word) << "\n";
  }
  j["witnesses"] = std::move(witnesses);
  {
    json k;
    k["word_length"] = report.kernel.word_length;
    k["fixers"] = report.kernel.fixers.size();
    k["trivial_actors"] = report.kernel.trivial_actors.size();
    json rational = json::array();
    for (const auto& w : report.kernel.rational) rational.push_back(sys.format_word(w));
    k["rational"] = std::move(rational);
    k["undecided"] = report.kernel.undecided.size();
    j["kernel"] = std::move(k);
  }
  text << "  verdicts: stable=" << evidence_name(report.verdict.stable)
       << " dynamically_wild=" << evidence_name(report.verdict.dynamically_wild)
       << "\n";
  emit(j, opt, text.str());
  return kOk;
}

int run_probe_coe(const Options& opt, const std::string& g_sys, const std::string& h_sys,
                  int level, int wordlen) {
  AutomatonSystem G = load_system(g_sys);
  AutomatonSystem H = load_system(h_sys);
  auto res = coe_check(G, H, level, wordlen, opt.caps);
  json j;
  std::ostringstream text;
  if (const auto* w = std::get_if<CoeWitness>(&res)) {
    j["found"] = true;
    j["partition_level"] = w->partition_level;
    j["partition_preserved"] = w->partition_preserved;
    auto dir = [&](const std::vector<CoeAssignment>& v) {
      json arr = json::array();
      for (const auto& a : v) {
        json e;
        e["generator"] = a.source_gen;
        e["block"] = a.block.str();
        e["word"] = G.format_word(a.target_word);
        arr.push_back(std::move(e));
        text << "  " << a.source_gen << " on " << a.block.str() << " -> "
             << G.format_word(a.target_word) << "\n";
      }
      return arr;
    };
    text << "orbit transfer found at partition level " << level << "\nalpha:\n";
    j["alpha"] = dir(w->alpha);
    text << "beta:\n";
    j["beta"] = dir(w->beta);
  } else {
    const auto& c = std::get<CoeCounterexample>(res);
    j["found"] = false;
    j["direction"] = c.direction;
    j["generator"] = c.generator;
    j["block"] = c.block.str();
    text << "no transfer word for " << c.generator << " on " << c.block.str()
         << " (" << c.direction << ")\n";
  }
  emit(j, opt, text.str());
  return kOk;
}

int run_probe_nonhausdorff(const Options& opt, const std::string& system,
                           const std::string& word, const std::string& point, int depth,
                           int extra) {
  AutomatonSystem sys = load_system(system);
  GroupWord g = sys.parse_word(word);
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), point);
  auto res = non_hausdorff_probe(sys, g, x, depth, extra, opt.caps);
  json j;
  std::ostringstream text;
  if (const auto* w = std::get_if<NonHausdorffWitness>(&res)) {
    j["found"] = true;
    j["word"] = sys.format_word(w->word);
    j["basepoint"] = w->basepoint.str();
    json levels = json::array();
    text << sys.format_word(g) << " is non-Hausdorff at " << x.str() << " to depth "
         << depth << "\n";
    for (const auto& lv : w->levels) {
      json e;
      e["U"] = lv.U.str();
      e["W"] = lv.W.str();
      e["fixed_point"] = lv.fixed_point.str();
      levels.push_back(std::move(e));
      text << "  U=" << lv.U.str() << "  W=" << lv.W.str() << "  fixes "
           << lv.fixed_point.str() << "\n";
    }
    j["levels"] = std::move(levels);
  } else {
    const auto& f = std::get<NonHausdorffFailure>(res);
    j["found"] = false;
    j["failed_level"] = f.failed_level;
    j["reason"] = f.reason;
    text << "no witness: " << f.reason << "\n";
  }
  emit(j, opt, text.str());
  return kOk;
}

int run_probe_lqa(const Options& opt, const std::string& system, int wordlen, int outer,
                  int inner) {
  AutomatonSystem sys = load_system(system);
  auto violations = lqa_probe(sys, wordlen, outer, inner, opt.caps);
  json j;
  j["violations"] = json::array();
  std::ostringstream text;
  for (const auto& v : violations) {
    json e;
    e["word"] = sys.format_word(v.word);
    e["outer"] = v.outer.str();
    e["inner"] = v.inner.str();
    j["violations"].push_back(std::move(e));
    text << sys.format_word(v.word) << ": identity on " << v.inner.str()
         << " but not on " << v.outer.str() << "\n";
  }
  if (violations.empty()) text << "no violations in the search box\n";
  emit(j, opt, text.str());
  return kOk;
}

int run_probe_topfree(const Options& opt, const std::string& system, int wordlen,
                      int depth) {
  AutomatonSystem sys = load_system(system);
  auto report = topological_freeness_probe(sys, wordlen, depth, opt.caps);
  json j;
  j["witnessed_not_free"] = report.witnessed_not_free;
  j["max_wordlen"] = report.max_wordlen;
  j["depth"] = report.depth;
  json records = json::array();
  std::ostringstream text;
  for (const auto& r : report.records) {
    json e;
    e["word"] = sys.format_word(r.word);
    json cs = json::array();
    for (const auto& c : r.fixed_cylinders) cs.push_back(c.str());
    e["fixed_cylinders"] = std::move(cs);
    records.push_back(std::move(e));
    text << sys.format_word(r.word) << " is the identity on";
    for (const auto& c : r.fixed_cylinders) text << " " << c.str();
    text << "\n";
  }
  j["records"] = std::move(records);
  if (report.records.empty()) text << "no nontrivial word fixes a cylinder in the box\n";
  emit(j, opt, text.str());
  return kOk;
}

int run_probe_germ(const Options& opt, const std::string& system, const std::string& word,
                   const std::string& point, int depth) {
  AutomatonSystem sys = load_system(system);
  GroupWord g = sys.parse_word(word);
  BoundaryPoint x = BoundaryPoint::parse(sys.degree(), point);
  GermReport report = germ_hausdorff_probe(sys, g, x, depth, opt.caps);
  json j;
  j["trivial_germ"] = report.trivial_germ;
  j["identity_level"] = report.identity_level;
  json cs = json::array();
  for (const auto& c : report.accumulating_identity_cylinders) cs.push_back(c.str());
  j["accumulating_identity_cylinders"] = std::move(cs);
  std::ostringstream text;
  if (report.trivial_germ)
    text << "trivial germ: identity on the level-" << report.identity_level
         << " cylinder\n";
  else {
    text << "nontrivial germ to depth " << depth << "\n";
    for (const auto& c : report.accumulating_identity_cylinders)
      text << "  identity on " << c.str() << "\n";
  }
  emit(j, opt, text.str());
  return kOk;
}

int run_cache_stats(const Options& opt) {
  uint64_t entries = 0, bytes = 0;
  std::error_code ec;
  if (fs::exists(opt.cache_dir, ec)) {
    for (const auto& f : fs::directory_iterator(opt.cache_dir, ec)) {
      if (!f.is_regular_file()) continue;
      ++entries;
      bytes += f.file_size(ec);
    }
  }
  json j;
  j["cache_dir"] = opt.cache_dir;
  j["entries"] = entries;
  j["bytes"] = bytes;
  std::ostringstream text;
  text << opt.cache_dir << ": " << entries << " entries, " << bytes << " bytes\n";
  emit(j, opt, text.str());
  return kOk;
}

int run_cache_clear(const Options& opt) {
  uint64_t removed = 0;
  std::error_code ec;
  if (fs::exists(opt.cache_dir, ec)) {
    for (const auto& f : fs::directory_iterator(opt.cache_dir, ec)) {
      if (!f.is_regular_file()) continue;
      if (fs::remove(f.path(), ec)) ++removed;
    }
  }
  json j;
  j["cache_dir"] = opt.cache_dir;
  j["removed"] = removed;
  std::ostringstream text;
  text << "removed " << removed << " entries from " << opt.cache_dir << "\n";
  emit(j, opt, text.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-chain invariants of tree-boundary actions"};
  app.require_subcommand(1);

  Options opt;
  opt.cache_dir = default_cache_dir();
  app.add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->envname("CHAINSCOPE_FORMAT")
      ->capture_default_str();
  app.add_option("--cache-dir", opt.cache_dir, "level-group cache directory")
      ->envname("CHAINSCOPE_CACHE_DIR");
  app.add_option("--point-cap", opt.caps.point_cap, "max level size d^n")
      ->envname("CHAINSCOPE_POINT_CAP");
  app.add_option("--enum-cap", opt.caps.enum_cap, "max group elements enumerated")
      ->envname("CHAINSCOPE_ENUM_CAP");
  app.add_option("--closure-cap", opt.caps.closure_cap, "max identity-closure size")
      ->envname("CHAINSCOPE_CLOSURE_CAP");
  app.add_option("--state-cap", opt.caps.state_cap, "max boundary-orbit states")
      ->envname("CHAINSCOPE_STATE_CAP");
  app.add_option("--word-cap", opt.caps.word_cap, "max words enumerated")
      ->envname("CHAINSCOPE_WORD_CAP");

  std::string system, word, point;
  int depth = 4, truncation = -1, lookahead = 3, wordlen = 6, kernel_wordlen = 4;
  int partition_level = 1, extra = 6, outer = 2, inner = 6;
  std::string g_system, h_system;

  auto* eval = app.add_subcommand("eval", "apply a word to a boundary point");
  eval->add_option("system", system, "builtin name or system file")->required();
  eval->add_option("word", word, "group word")->required();
  eval->add_option("point", point, "boundary point PRE.(PERIOD)")->required();

  auto* chain = app.add_subcommand("chain", "compute the chain report");
  chain->add_option("system", system)->required();
  chain->add_option("basepoint", point)->required();
  chain->add_option("--depth", depth, "chain depth L")->envname("CHAINSCOPE_DEPTH");
  chain->add_option("--truncation", truncation, "truncation level n (default: depth)");
  chain->add_option("--lookahead", lookahead, "extra levels past the truncation")
      ->envname("CHAINSCOPE_LOOKAHEAD");
  chain->add_option("--wordlen", wordlen, "witness word length")
      ->envname("CHAINSCOPE_WORDLEN");
  chain->add_option("--kernel-wordlen", kernel_wordlen, "kernel probe word length");

  auto* probe = app.add_subcommand("probe", "dynamics probes");
  probe->require_subcommand(1);
  auto* coe = probe->add_subcommand("coe", "continuous-orbit-equivalence transfer maps");
  coe->set_help_flag("--help", "print help");  // frees -h/--h for the second system
  coe->add_option("--g", g_system, "first system")->required();
  coe->add_option("--h", h_system, "second system")->required();
  coe->add_option("--level", partition_level, "partition level");
  coe->add_option("--wordlen", wordlen, "max transfer word length")
      ->envname("CHAINSCOPE_WORDLEN");
  auto* nh = probe->add_subcommand("nonhausdorff", "non-Hausdorff element witness");
  nh->add_option("system", system)->required();
  nh->add_option("--g", word, "group word")->required();
  nh->add_option("--x", point, "fixed boundary point")->required();
  nh->add_option("--depth", depth)->envname("CHAINSCOPE_DEPTH");
  nh->add_option("--extra", extra, "levels below U_l searched for W");
  auto* lqa = probe->add_subcommand("lqa", "locally-quasi-analytic violation search");
  lqa->add_option("system", system)->required();
  lqa->add_option("--wordlen", wordlen)->envname("CHAINSCOPE_WORDLEN");
  lqa->add_option("--outer", outer, "max outer cylinder level");
  lqa->add_option("--inner", inner, "max inner cylinder level");
  auto* tf = probe->add_subcommand("topfree", "topological freeness probe");
  tf->add_option("system", system)->required();
  tf->add_option("--wordlen", wordlen)->envname("CHAINSCOPE_WORDLEN");
  tf->add_option("--depth", depth)->envname("CHAINSCOPE_DEPTH");
  auto* germ = probe->add_subcommand("germ", "germ triviality at a fixed point");
  germ->add_option("system", system)->required();
  germ->add_option("--g", word, "group word")->required();
  germ->add_option("--x", point, "fixed boundary point")->required();
  germ->add_option("--depth", depth)->envname("CHAINSCOPE_DEPTH");

  auto* cache = app.add_subcommand("cache", "persistent cache management");
  cache->require_subcommand(1);
  auto* stats = cache->add_subcommand("stats", "entry and byte counts");
  auto* clear = cache->add_subcommand("clear", "remove all entries");

  // global flags (format, caps, cache dir) may appear after any subcommand
  for (auto* sub : {eval, chain, probe, coe, nh, lqa, tf, germ, cache, stats, clear})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParseError;
  }

  try {
    if (eval->parsed()) return run_eval(opt, system, word, point);
    if (chain->parsed())
      return run_chain(opt, system, point, depth, truncation, lookahead, wordlen,
                       kernel_wordlen);
    if (coe->parsed())
      return run_probe_coe(opt, g_system, h_system, partition_level, wordlen);
    if (nh->parsed()) return run_probe_nonhausdorff(opt, system, word, point, depth, extra);
    if (lqa->parsed()) return run_probe_lqa(opt, system, wordlen, outer, inner);
    if (tf->parsed()) return run_probe_topfree(opt, system, wordlen, depth);
    if (germ->parsed()) return run_probe_germ(opt, system, word, point, depth);
    if (stats->parsed()) return run_cache_stats(opt);
    if (clear->parsed()) return run_cache_clear(opt);
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const resource_error& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const domain_error& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
