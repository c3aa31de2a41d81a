#include "chainscope/builtin.hpp"

#include <sstream>

namespace chainscope {

namespace {

// Splits "pink:2,3" or "pink(2,3)" into base name and integer args.
bool split_params(const std::string& name, std::string& base, std::vector<int>& args) {
  size_t sep = name.find_first_of(":(");
  if (sep == std::string::npos) {
    base = name;
    return true;
  }
  base = name.substr(0, sep);
  std::string rest = name.substr(sep + 1);
  if (!rest.empty() && rest.back() == ')') rest.pop_back();
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      args.push_back(std::stoi(item));
    } catch (...) {
      return false;
    }
  }
  return true;
}

// The a_i family from iterated monodromy groups of quadratic polynomials:
// a_1 flips the root, a_{s+1} = (a_s, a_r), every other a_i = (a_{i-1}, 1).
// a_2 = (a_1, 1) fills the gap the inductive ranges leave at i = 2.
std::string pink_source(int s, int r) {
  if (r < 3 || s < 2 || s >= r)
    throw domain_error("pink(s,r) requires r >= 3 and 2 <= s < r");
  std::ostringstream out;
  out << "degree = 2\n";
  out << "gen a1 = [1,0] (e, e)\n";
  out << "gen a2 = [0,1] (a1, e)\n";
  for (int i = 3; i <= r; ++i) {
    if (i == s + 1)
      out << "gen a" << i << " = [0,1] (a" << s << ", a" << r << ")\n";
    else
      out << "gen a" << i << " = [0,1] (a" << (i - 1) << ", e)\n";
  }
  return out.str();
}

}  // namespace

AutomatonSystem builtin_system(const std::string& name) {
  std::string base;
  std::vector<int> args;
  if (!split_params(name, base, args))
    throw domain_error("bad builtin system parameters: " + name);

  if (base == "odometer") {
    return AutomatonSystem::parse("degree = 2\ngen a = [1,0] (a, e)\n");
  }
  if (base == "coe-pair" || base == "coe-pair-G") {
    return AutomatonSystem::parse(
        "degree = 2\n"
        "gen a1 = [1,0] (a1, e)\n"
        "gen a2 = [0,1] (a1, e)\n");
  }
  if (base == "coe-pair-H") {
    return AutomatonSystem::parse("degree = 2\ngen a1 = [1,0] (a1, e)\n");
  }
  if (base == "pink") {
    if (args.size() != 2) throw domain_error("pink needs two parameters: pink:s,r");
    return AutomatonSystem::parse(pink_source(args[0], args[1]));
  }
  if (base == "pink2s") {
    if (args.size() != 1) throw domain_error("pink2s needs one parameter: pink2s:s");
    return AutomatonSystem::parse(pink_source(args[0], 2 * args[0]));
  }
  throw domain_error("unknown builtin system: " + name);
}

bool is_builtin_name(const std::string& name) {
  std::string base;
  std::vector<int> args;
  if (!split_params(name, base, args)) return false;
  return base == "odometer" || base == "coe-pair" || base == "coe-pair-G" ||
         base == "coe-pair-H" || base == "pink" || base == "pink2s";
}

}  // namespace chainscope
