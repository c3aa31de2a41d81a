#include "chainscope/word.hpp"

namespace chainscope {

namespace {

void push_reduced(std::vector<Factor>& out, Factor f) {
  if (!out.empty() && out.back().gen == f.gen && out.back().sign == -f.sign)
    out.pop_back();
  else
    out.push_back(f);
}

}  // namespace

GroupWord::GroupWord(std::vector<Factor> factors) {
  factors_.reserve(factors.size());
  for (Factor f : factors) push_reduced(factors_, f);
}

GroupWord GroupWord::generator(int gen, int sign) {
  GroupWord w;
  w.factors_.push_back({gen, sign});
  return w;
}

GroupWord GroupWord::inverse() const {
  GroupWord w;
  w.factors_.reserve(factors_.size());
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
    w.factors_.push_back({it->gen, -it->sign});
  return w;
}

GroupWord GroupWord::operator*(const GroupWord& rhs) const {
  GroupWord w;
  w.factors_ = factors_;
  for (Factor f : rhs.factors_) push_reduced(w.factors_, f);
  return w;
}

GroupWord GroupWord::pow(long long k) const {
  GroupWord base = k >= 0 ? *this : inverse();
  if (k < 0) k = -k;
  GroupWord out;
  for (long long i = 0; i < k; ++i) out = out * base;
  return out;
}

std::string GroupWord::key() const {
  std::string s;
  s.reserve(factors_.size() * 3);
  for (Factor f : factors_) {
    s += std::to_string(f.gen);
    s.push_back(f.sign > 0 ? '+' : '-');
  }
  return s;
}

}  // namespace chainscope
