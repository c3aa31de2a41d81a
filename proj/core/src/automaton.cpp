#include "chainscope/automaton.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace chainscope {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

RootPerm::RootPerm(std::vector<uint8_t> images) : images_(std::move(images)) {
  const size_t d = images_.size();
  preimages_.assign(d, 255);
  for (size_t i = 0; i < d; ++i) {
    uint8_t img = images_[i];
    if (img >= d || preimages_[img] != 255)
      throw domain_error("root permutation is not a bijection");
    preimages_[img] = static_cast<uint8_t>(i);
  }
}

RootPerm RootPerm::identity(Degree d) {
  std::vector<uint8_t> images(static_cast<size_t>(d.value()));
  for (size_t i = 0; i < images.size(); ++i) images[i] = static_cast<uint8_t>(i);
  return RootPerm(std::move(images));
}

bool RootPerm::is_identity() const {
  for (size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

AutomatonSystem::AutomatonSystem(Degree d, std::vector<GeneratorDef> gens,
                                 std::string source)
    : d_(d), gens_(std::move(gens)), source_(std::move(source)) {
  std::unordered_set<std::string> names;
  for (const auto& g : gens_) {
    if (!names.insert(g.name).second)
      throw domain_error("duplicate generator name: " + g.name);
    if (g.root.degree() != d_.value())
      throw domain_error("root permutation degree mismatch for " + g.name);
    if (static_cast<int>(g.sections.size()) != d_.value())
      throw domain_error("wrong section count for " + g.name);
    for (const auto& s : g.sections)
      for (Factor f : s.factors())
        if (f.gen < 0 || f.gen >= static_cast<int>(gens_.size()))
          throw domain_error("section references unknown generator in " + g.name);
  }
  // Canonical serialization for the content hash.
  std::ostringstream canon;
  canon << "d=" << d_.value() << ";";
  for (const auto& g : gens_) {
    canon << g.name << "=[";
    for (uint8_t i : g.root.images()) canon << int(i) << ",";
    canon << "](";
    for (const auto& s : g.sections) canon << s.key() << ",";
    canon << ");";
  }
  hash_ = hex64(fnv1a(canon.str()));
}

int AutomatonSystem::generator_index(const std::string& name) const {
  for (size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return static_cast<int>(i);
  return -1;
}

Decision AutomatonSystem::cached_identity(const std::string& key) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = identity_cache_.find(key);
  return it == identity_cache_.end() ? Decision::Undecided : it->second;
}

void AutomatonSystem::cache_identity(const std::string& key, Decision d) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  identity_cache_.emplace(key, d);
}

size_t AutomatonSystem::identity_cache_size() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return identity_cache_.size();
}

// ---------------------------------------------------------------------------
// system-definition parsing

namespace {

struct LineScanner {
  // splits source into logical statements on newlines and ';', stripping
  // '#' comments, remembering line numbers
  std::vector<std::pair<std::string, int>> statements;

  explicit LineScanner(const std::string& text) {
    int line_no = 1;
    std::string cur;
    auto flush = [&](int at_line) {
      std::string t = trim(cur);
      if (!t.empty()) statements.emplace_back(t, at_line);
      cur.clear();
    };
    bool in_comment = false;
    for (char c : text) {
      if (c == '\n') {
        flush(line_no);
        ++line_no;
        in_comment = false;
      } else if (in_comment) {
        continue;
      } else if (c == '#') {
        in_comment = true;
      } else if (c == ';') {
        flush(line_no);
      } else {
        cur.push_back(c);
      }
    }
    flush(line_no);
  }
};

// Parses a word over the given name table. Grammar:
//   word   := 'e' | factor ('*' factor)*
//   factor := name | name '^' int
GroupWord parse_word_text(const std::string& text,
                          const std::vector<std::string>& names, int line) {
  std::string t = trim(text);
  if (t.empty()) throw parse_error("empty word", line);
  if (t == "e") return GroupWord{};
  std::vector<Factor> factors;
  size_t pos = 0;
  while (pos < t.size()) {
    if (!is_name_start(t[pos]))
      throw parse_error("expected generator name in word: " + t, line);
    size_t start = pos;
    while (pos < t.size() && is_name_char(t[pos])) ++pos;
    std::string name = t.substr(start, pos - start);
    if (name == "e") throw parse_error("'e' cannot carry an exponent or appear in a product", line);
    int gen = -1;
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) gen = static_cast<int>(i);
    if (gen < 0) throw parse_error("unknown generator name: " + name, line);
    long long exp = 1;
    if (pos < t.size() && t[pos] == '^') {
      ++pos;
      size_t estart = pos;
      if (pos < t.size() && (t[pos] == '-' || t[pos] == '+')) ++pos;
      while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
      try {
        exp = std::stoll(t.substr(estart, pos - estart));
      } catch (...) {
        throw parse_error("bad exponent in word: " + t, line);
      }
      if (exp == 0) throw parse_error("exponent must be nonzero", line);
    }
    int sign = exp > 0 ? 1 : -1;
    for (long long i = 0; i < (exp > 0 ? exp : -exp); ++i) factors.push_back({gen, sign});
    while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t')) ++pos;
    if (pos < t.size()) {
      if (t[pos] != '*') throw parse_error("expected '*' between factors: " + t, line);
      ++pos;
      while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t')) ++pos;
    }
  }
  return GroupWord(std::move(factors));
}

// splits "a, b, c" at top level commas
std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

AutomatonSystem AutomatonSystem::parse(const std::string& text) {
  LineScanner scan(text);
  std::optional<int> degree;
  struct RawGen {
    std::string name;
    std::string perm_part, sections_part;
    int line;
  };
  std::vector<RawGen> raw;
  std::vector<std::string> names;

  for (const auto& [stmt, line] : scan.statements) {
    if (stmt.rfind("degree", 0) == 0) {
      size_t eq = stmt.find('=');
      if (eq == std::string::npos) throw parse_error("expected 'degree = N'", line);
      try {
        degree = std::stoi(trim(stmt.substr(eq + 1)));
      } catch (...) {
        throw parse_error("bad degree value", line);
      }
    } else if (stmt.rfind("gen", 0) == 0 && stmt.size() > 3 &&
               std::isspace(static_cast<unsigned char>(stmt[3]))) {
      size_t eq = stmt.find('=');
      if (eq == std::string::npos) throw parse_error("expected 'gen NAME = [..](..)'", line);
      std::string name = trim(stmt.substr(4, eq - 4));
      if (name.empty() || !is_name_start(name[0]))
        throw parse_error("bad generator name: " + name, line);
      for (char c : name)
        if (!is_name_char(c)) throw parse_error("bad generator name: " + name, line);
      if (name == "e") throw parse_error("'e' is reserved for the identity", line);
      std::string rhs = trim(stmt.substr(eq + 1));
      size_t lb = rhs.find('['), rb = rhs.find(']');
      size_t lp = rhs.find('(', rb == std::string::npos ? 0 : rb);
      size_t rp = rhs.rfind(')');
      if (lb == std::string::npos || rb == std::string::npos || lp == std::string::npos ||
          rp == std::string::npos || rp < lp)
        throw parse_error("expected '[images](sections)' after '='", line);
      raw.push_back({name, rhs.substr(lb + 1, rb - lb - 1), rhs.substr(lp + 1, rp - lp - 1), line});
      names.push_back(name);
    } else {
      throw parse_error("unrecognized statement: " + stmt, line);
    }
  }

  if (!degree) throw parse_error("missing 'degree = N'", 1);
  if (*degree < 2 || *degree > 36) throw parse_error("degree must be in [2, 36]", 1);
  Degree d(*degree);

  std::vector<GeneratorDef> gens;
  for (const auto& rg : raw) {
    std::vector<uint8_t> images;
    for (const std::string& part : split_commas(rg.perm_part)) {
      std::string p = trim(part);
      int v;
      try {
        v = std::stoi(p);
      } catch (...) {
        throw parse_error("bad permutation image: " + p, rg.line);
      }
      if (v < 0 || v >= d.value())
        throw parse_error("permutation image out of range: " + p, rg.line);
      images.push_back(static_cast<uint8_t>(v));
    }
    if (static_cast<int>(images.size()) != d.value())
      throw parse_error("permutation must list " + std::to_string(d.value()) + " images",
                        rg.line);
    RootPerm root = [&]() {
      try {
        return RootPerm(std::move(images));
      } catch (const domain_error& e) {
        throw parse_error(e.what(), rg.line);
      }
    }();

    std::vector<GroupWord> sections;
    for (const std::string& part : split_commas(rg.sections_part))
      sections.push_back(parse_word_text(part, names, rg.line));
    if (static_cast<int>(sections.size()) != d.value())
      throw parse_error("expected " + std::to_string(d.value()) + " sections", rg.line);

    gens.push_back({rg.name, std::move(root), std::move(sections)});
  }

  return AutomatonSystem(d, std::move(gens), text);
}

GroupWord AutomatonSystem::parse_word(const std::string& text) const {
  std::vector<std::string> names;
  names.reserve(gens_.size());
  for (const auto& g : gens_) names.push_back(g.name);
  return parse_word_text(text, names, 0);
}

std::string AutomatonSystem::format_word(const GroupWord& w) const {
  if (w.is_empty()) return "e";
  std::string out;
  const auto& fs = w.factors();
  size_t i = 0;
  while (i < fs.size()) {
    size_t j = i;
    while (j < fs.size() && fs[j] == fs[i]) ++j;
    long long exp = static_cast<long long>(j - i) * fs[i].sign;
    if (!out.empty()) out += "*";
    out += gens_[static_cast<size_t>(fs[i].gen)].name;
    if (exp != 1) out += "^" + std::to_string(exp);
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// action

std::pair<uint8_t, GroupWord> step(const AutomatonSystem& sys, const GroupWord& w,
                                   uint8_t letter) {
  uint8_t cur = letter;
  GroupWord sec;
  const auto& fs = w.factors();
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) {
    const GeneratorDef& g = sys.generators()[static_cast<size_t>(it->gen)];
    if (it->sign > 0) {
      uint8_t img = g.root.apply(cur);
      sec = g.sections[img] * sec;
      cur = img;
    } else {
      // g^{-1}(j.w) = p^{-1}(j) . s_j^{-1}(w)
      sec = g.sections[cur].inverse() * sec;
      cur = g.root.apply_inverse(cur);
    }
  }
  return {cur, std::move(sec)};
}

Vertex act_on_vertex(const AutomatonSystem& sys, const GroupWord& w, const Vertex& v) {
  GroupWord cur = w;
  std::vector<uint8_t> out;
  out.reserve(static_cast<size_t>(v.level()));
  for (uint8_t letter : v.letters()) {
    auto [img, sec] = step(sys, cur, letter);
    out.push_back(img);
    cur = std::move(sec);
  }
  return Vertex::unchecked(std::move(out));
}

GroupWord section(const AutomatonSystem& sys, const GroupWord& w, const Vertex& v) {
  GroupWord cur = w;
  for (uint8_t letter : v.letters()) cur = step(sys, cur, letter).second;
  return cur;
}

BoundaryPoint act_on_boundary(const AutomatonSystem& sys, const GroupWord& w,
                              const BoundaryPoint& x, const Caps& caps) {
  GroupWord cur = w;
  std::vector<uint8_t> out;
  for (uint8_t letter : x.preperiod()) {
    auto [img, sec] = step(sys, cur, letter);
    out.push_back(img);
    cur = std::move(sec);
  }
  const auto& per = x.period();
  std::unordered_map<std::string, size_t> seen;  // (word,phase) -> emitted count
  size_t phase = 0;
  for (;;) {
    std::string state = cur.key() + "@" + std::to_string(phase);
    auto [it, inserted] = seen.emplace(state, out.size());
    if (!inserted) {
      size_t t0 = it->second;
      std::vector<uint8_t> pre(out.begin(), out.begin() + static_cast<long>(t0));
      std::vector<uint8_t> period(out.begin() + static_cast<long>(t0), out.end());
      return BoundaryPoint(sys.degree(), std::move(pre), std::move(period));
    }
    if (seen.size() > caps.state_cap)
      throw resource_error("boundary action state cap exceeded after " +
                           std::to_string(out.size()) + " letters");
    auto [img, sec] = step(sys, cur, per[phase]);
    out.push_back(img);
    cur = std::move(sec);
    phase = (phase + 1) % per.size();
  }
}

Decision fixes_boundary_point(const AutomatonSystem& sys, const GroupWord& w,
                              const BoundaryPoint& x, const Caps& caps) {
  GroupWord cur = w;
  uint64_t pos = 0;
  for (uint8_t letter : x.preperiod()) {
    auto [img, sec] = step(sys, cur, letter);
    if (img != letter) return Decision::No;
    cur = std::move(sec);
    ++pos;
  }
  const auto& per = x.period();
  std::unordered_set<std::string> seen;
  size_t phase = 0;
  for (;;) {
    std::string state = cur.key() + "@" + std::to_string(phase);
    if (!seen.insert(state).second) return Decision::Yes;
    if (seen.size() > caps.state_cap) return Decision::Undecided;
    uint8_t letter = per[phase];
    auto [img, sec] = step(sys, cur, letter);
    if (img != letter) return Decision::No;
    cur = std::move(sec);
    phase = (phase + 1) % per.size();
  }
}

Decision is_identity(const AutomatonSystem& sys, const GroupWord& w, const Caps& caps) {
  {
    Decision cached = sys.cached_identity(w.key());
    if (cached != Decision::Undecided) return cached;
  }
  const int d = sys.degree().value();
  std::unordered_set<std::string> visited;
  std::deque<GroupWord> queue;
  visited.insert(w.key());
  queue.push_back(w);
  while (!queue.empty()) {
    GroupWord cur = std::move(queue.front());
    queue.pop_front();
    Decision cached = sys.cached_identity(cur.key());
    if (cached == Decision::Yes) continue;  // known identity; no violations below
    for (uint8_t i = 0; i < d; ++i) {
      auto [img, sec] = step(sys, cur, i);
      if (img != i) {
        sys.cache_identity(cur.key(), Decision::No);
        sys.cache_identity(w.key(), Decision::No);
        return Decision::No;
      }
      if (visited.insert(sec.key()).second) {
        if (visited.size() > caps.closure_cap) return Decision::Undecided;
        queue.push_back(std::move(sec));
      }
    }
  }
  // greatest fixpoint: the whole closure acts trivially at every root
  for (const auto& key : visited) sys.cache_identity(key, Decision::Yes);
  return Decision::Yes;
}

Decision is_identity_on_cylinder(const AutomatonSystem& sys, const GroupWord& w,
                                 const Cylinder& c, const Caps& caps) {
  if (act_on_vertex(sys, w, c.root) != c.root) return Decision::No;
  return is_identity(sys, section(sys, w, c.root), caps);
}

Decision equal_on_cylinder(const AutomatonSystem& sys, const GroupWord& w1,
                           const GroupWord& w2, const Cylinder& c, const Caps& caps) {
  return is_identity_on_cylinder(sys, w1.inverse() * w2, c, caps);
}

Portrait portrait(const AutomatonSystem& sys, const GroupWord& w, int depth,
                  const Caps& caps) {
  const int d = sys.degree().value();
  level_size(sys.degree(), depth, caps.point_cap);  // cap check
  Portrait p;
  p.depth = depth;
  std::vector<GroupWord> level{w};
  for (int l = 0; l <= depth; ++l) {
    std::vector<std::vector<uint8_t>> perms;
    std::vector<GroupWord> next;
    perms.reserve(level.size());
    if (l < depth) next.reserve(level.size() * static_cast<size_t>(d));
    for (const GroupWord& u : level) {
      std::vector<uint8_t> images(static_cast<size_t>(d));
      for (uint8_t i = 0; i < d; ++i) {
        auto [img, sec] = step(sys, u, i);
        images[i] = img;
        if (l < depth) next.push_back(std::move(sec));
      }
      perms.push_back(std::move(images));
    }
    p.perms.push_back(std::move(perms));
    level = std::move(next);
  }
  return p;
}

bool Portrait::all_trivial() const {
  for (const auto& level : perms)
    for (const auto& images : level)
      for (size_t i = 0; i < images.size(); ++i)
        if (images[i] != i) return false;
  return true;
}

std::vector<GroupWord> reduced_words_up_to(const AutomatonSystem& sys, int max_len,
                                           uint64_t cap) {
  std::vector<GroupWord> out{GroupWord{}};
  size_t prev_begin = 0;
  const int ngens = static_cast<int>(sys.generators().size());
  for (int len = 1; len <= max_len; ++len) {
    const size_t begin = out.size();
    for (size_t i = prev_begin; i < begin; ++i) {
      const GroupWord base = out[i];
      for (int g = 0; g < ngens; ++g) {
        for (int sign : {+1, -1}) {
          if (!base.factors().empty()) {
            Factor last = base.factors().back();
            if (last.gen == g && last.sign == -sign) continue;
          }
          if (out.size() >= cap)
            throw resource_error("word enumeration cap exceeded");
          out.push_back(base * GroupWord::generator(g, sign));
        }
      }
    }
    prev_begin = begin;
    if (begin == out.size()) break;  // no generators
  }
  return out;
}

}  // namespace chainscope
