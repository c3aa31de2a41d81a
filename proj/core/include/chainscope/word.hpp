#ifndef CHAINSCOPE_WORD_HPP
#define CHAINSCOPE_WORD_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace chainscope {

// One letter of a group word: a generator index and an exponent sign.
struct Factor {
  int gen;    // index into the system's generator table
  int sign;   // +1 or -1

  bool operator==(const Factor&) const = default;
  auto operator<=>(const Factor&) const = default;
};

// A freely reduced word in the system's generators. The empty word is the
// identity. Multiplication `u * v` means "u after v": the rightmost factor
// acts first.
class GroupWord {
public:
  GroupWord() = default;
  explicit GroupWord(std::vector<Factor> factors);  // reduces on construction

  static GroupWord generator(int gen, int sign = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_empty() const { return factors_.empty(); }
  size_t length() const { return factors_.size(); }

  GroupWord inverse() const;
  GroupWord operator*(const GroupWord& rhs) const;
  GroupWord pow(long long k) const;

  bool operator==(const GroupWord&) const = default;
  auto operator<=>(const GroupWord&) const = default;

  // Compact key for hashing/memo tables.
  std::string key() const;

private:
  std::vector<Factor> factors_;
};

}  // namespace chainscope

#endif
