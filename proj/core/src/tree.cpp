#include "chainscope/tree.hpp"

#include <algorithm>

namespace chainscope {

namespace {

char digit_char(uint8_t v) {
  return v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + (v - 10));
}

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  return -1;
}

// Smallest p such that w is a power of its length-p prefix.
size_t primitive_root_length(const std::vector<uint8_t>& w) {
  const size_t n = w.size();
  for (size_t p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (size_t i = p; i < n && ok; ++i) ok = (w[i] == w[i - p]);
    if (ok) return p;
  }
  return n;
}

}  // namespace

Degree::Degree(int d) : d_(d) {
  if (d < 2 || d > 36) throw domain_error("degree must be in [2, 36]");
}

Vertex::Vertex(Degree d, std::vector<uint8_t> letters) : letters_(std::move(letters)) {
  for (uint8_t l : letters_)
    if (l >= d.value()) throw domain_error("vertex letter out of range for degree");
}

bool Vertex::is_prefix_of(const Vertex& other) const {
  if (letters_.size() > other.letters_.size()) return false;
  return std::equal(letters_.begin(), letters_.end(), other.letters_.begin());
}

Vertex Vertex::prefix(int n) const {
  if (n < 0 || n > level()) throw domain_error("prefix length out of range");
  Vertex v;
  v.letters_.assign(letters_.begin(), letters_.begin() + n);
  return v;
}

Vertex Vertex::child(uint8_t letter) const {
  Vertex v = *this;
  v.letters_.push_back(letter);
  return v;
}

std::string Vertex::str() const {
  if (letters_.empty()) return "^";
  std::string s;
  s.reserve(letters_.size());
  for (uint8_t l : letters_) s.push_back(digit_char(l));
  return s;
}

Vertex Vertex::parse(Degree d, const std::string& text) {
  if (text == "^" || text.empty()) return Vertex{};
  std::vector<uint8_t> letters;
  letters.reserve(text.size());
  for (char c : text) {
    int v = digit_value(c);
    if (v < 0 || v >= d.value()) throw domain_error("bad vertex digit: " + std::string(1, c));
    letters.push_back(static_cast<uint8_t>(v));
  }
  return Vertex(d, std::move(letters));
}

uint64_t Vertex::index(Degree d) const {
  uint64_t idx = 0;
  for (uint8_t l : letters_) idx = idx * static_cast<uint64_t>(d.value()) + l;
  return idx;
}

Vertex Vertex::unchecked(std::vector<uint8_t> letters) {
  Vertex v;
  v.letters_ = std::move(letters);
  return v;
}

Vertex Vertex::from_index(Degree d, int level, uint64_t index) {
  std::vector<uint8_t> letters(static_cast<size_t>(level));
  for (int i = level - 1; i >= 0; --i) {
    letters[static_cast<size_t>(i)] = static_cast<uint8_t>(index % d.value());
    index /= d.value();
  }
  return Vertex(d, std::move(letters));
}

BoundaryPoint::BoundaryPoint(Degree d, std::vector<uint8_t> preperiod,
                             std::vector<uint8_t> period)
    : preperiod_(std::move(preperiod)), period_(std::move(period)) {
  if (period_.empty()) throw domain_error("boundary point needs a nonempty period");
  for (uint8_t l : preperiod_)
    if (l >= d.value()) throw domain_error("preperiod letter out of range");
  for (uint8_t l : period_)
    if (l >= d.value()) throw domain_error("period letter out of range");

  // Canonicalize: primitive period, then roll trailing preperiod letters
  // that match the period's last letter into a rotation.
  period_.resize(primitive_root_length(period_));
  while (!preperiod_.empty() && preperiod_.back() == period_.back()) {
    preperiod_.pop_back();
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
  }
}

uint8_t BoundaryPoint::letter_at(uint64_t i) const {
  if (i < preperiod_.size()) return preperiod_[i];
  return period_[(i - preperiod_.size()) % period_.size()];
}

std::string BoundaryPoint::str() const {
  std::string s;
  for (uint8_t l : preperiod_) s.push_back(digit_char(l));
  s += ".(";
  for (uint8_t l : period_) s.push_back(digit_char(l));
  s += ")";
  return s;
}

BoundaryPoint BoundaryPoint::parse(Degree d, const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos || dot + 1 >= text.size() || text[dot + 1] != '(' ||
      text.back() != ')')
    throw domain_error("boundary point must look like PRE.(PERIOD): " + text);
  auto read = [&](const std::string& part) {
    std::vector<uint8_t> out;
    for (char c : part) {
      int v = digit_value(c);
      if (v < 0 || v >= d.value()) throw domain_error("bad digit in boundary point: " + text);
      out.push_back(static_cast<uint8_t>(v));
    }
    return out;
  };
  auto pre = read(text.substr(0, dot));
  auto per = read(text.substr(dot + 2, text.size() - dot - 3));
  return BoundaryPoint(d, std::move(pre), std::move(per));
}

Vertex prefix(const BoundaryPoint& x, int n) {
  if (n < 0) throw domain_error("prefix length must be nonnegative");
  std::vector<uint8_t> letters(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) letters[static_cast<size_t>(i)] = x.letter_at(static_cast<uint64_t>(i));
  return Vertex::unchecked(std::move(letters));
}

bool contains(const Cylinder& c, const BoundaryPoint& x) {
  for (int i = 0; i < c.level(); ++i)
    if (x.letter_at(static_cast<uint64_t>(i)) != c.root.letter(i)) return false;
  return true;
}

BoundaryPoint shift(const Cylinder& c, const BoundaryPoint& x) {
  if (!contains(c, x)) throw domain_error("point not in cylinder");
  const size_t k = static_cast<size_t>(c.level());
  std::vector<uint8_t> pre = x.preperiod();
  std::vector<uint8_t> per = x.period();
  if (k <= pre.size()) {
    pre.erase(pre.begin(), pre.begin() + static_cast<long>(k));
  } else {
    size_t r = (k - pre.size()) % per.size();
    pre.clear();
    std::rotate(per.begin(), per.begin() + static_cast<long>(r), per.end());
  }
  return BoundaryPoint(Degree(36), std::move(pre), std::move(per));
}

uint64_t level_size(Degree d, int n, uint64_t point_cap) {
  if (n < 0) throw domain_error("level must be nonnegative");
  uint64_t size = 1;
  for (int i = 0; i < n; ++i) {
    size *= static_cast<uint64_t>(d.value());
    if (size > point_cap)
      throw resource_error("d^n exceeds point cap (" + std::to_string(point_cap) + ")");
  }
  return size;
}

std::vector<Vertex> level_vertices(Degree d, int n, uint64_t point_cap) {
  uint64_t size = level_size(d, n, point_cap);
  std::vector<Vertex> out;
  out.reserve(size);
  for (uint64_t i = 0; i < size; ++i) out.push_back(Vertex::from_index(d, n, i));
  return out;
}

}  // namespace chainscope
