#ifndef CHAINSCOPE_TREE_HPP
#define CHAINSCOPE_TREE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainscope {

// Thrown when a requested computation would exceed a configured resource cap.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an operation's precondition is violated (bad input domain).
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arity of the rooted tree. Letters are {0, ..., d-1}.
class Degree {
public:
  explicit Degree(int d);
  int value() const { return d_; }
  bool operator==(const Degree&) const = default;

private:
  int d_;
};

// A vertex of the d-ary tree: a finite word over {0,...,d-1}.
// The level of a vertex is the length of its word; the root is the empty word.
class Vertex {
public:
  Vertex() = default;
  Vertex(Degree d, std::vector<uint8_t> letters);

  int level() const { return static_cast<int>(letters_.size()); }
  const std::vector<uint8_t>& letters() const { return letters_; }
  uint8_t letter(int i) const { return letters_[static_cast<size_t>(i)]; }

  bool is_prefix_of(const Vertex& other) const;
  Vertex prefix(int n) const;
  Vertex child(uint8_t letter) const;

  // Text form: digit string, `^` for the root. Letters beyond 9 use a-z.
  std::string str() const;
  static Vertex parse(Degree d, const std::string& text);

  // Index in the lexicographic enumeration of its level (base-d value of the
  // digit string). This order is the canonical point index everywhere.
  uint64_t index(Degree d) const;
  static Vertex from_index(Degree d, int level, uint64_t index);

  // Builds from letters already known to be valid for the ambient degree.
  static Vertex unchecked(std::vector<uint8_t> letters);

  bool operator==(const Vertex&) const = default;
  auto operator<=>(const Vertex&) const = default;

private:
  std::vector<uint8_t> letters_;
};

// The clopen set of boundary points passing through a vertex.
struct Cylinder {
  Vertex root;

  int level() const { return root.level(); }
  std::string str() const { return root.str() + "T"; }
  bool operator==(const Cylinder&) const = default;
};

// An eventually periodic boundary point u v v v ... , stored in canonical
// form: the period is primitive and the preperiod does not end with a
// rotation absorbable into the period. Equality of canonical forms decides
// equality of the infinite sequences.
class BoundaryPoint {
public:
  BoundaryPoint(Degree d, std::vector<uint8_t> preperiod, std::vector<uint8_t> period);

  const std::vector<uint8_t>& preperiod() const { return preperiod_; }
  const std::vector<uint8_t>& period() const { return period_; }

  // Letter at position i >= 0 of the infinite word.
  uint8_t letter_at(uint64_t i) const;

  // Text form: `PREPERIOD.(PERIOD)`, e.g. `0001110.(0)`, `.(1)`.
  std::string str() const;
  static BoundaryPoint parse(Degree d, const std::string& text);

  bool operator==(const BoundaryPoint&) const = default;

private:
  std::vector<uint8_t> preperiod_;
  std::vector<uint8_t> period_;
};

Vertex prefix(const BoundaryPoint& x, int n);
bool contains(const Cylinder& c, const BoundaryPoint& x);
BoundaryPoint shift(const Cylinder& c, const BoundaryPoint& x);

// All d^n vertices of level n in lexicographic order.
// Throws resource_error when d^n exceeds point_cap.
std::vector<Vertex> level_vertices(Degree d, int n, uint64_t point_cap = 1u << 14);

// d^n as uint64_t; throws resource_error past the cap.
uint64_t level_size(Degree d, int n, uint64_t point_cap = 1u << 14);

}  // namespace chainscope

#endif
