#ifndef CHAINSCOPE_BUILTIN_HPP
#define CHAINSCOPE_BUILTIN_HPP

#include <string>

#include "chainscope/automaton.hpp"

namespace chainscope {

// Built-in named systems:
//   odometer        the binary adding machine, a = (a,1)s
//   coe-pair        generators a1 = (a1,1)s and a2 = (a1,1)  (alias coe-pair-G)
//   coe-pair-H      the subsystem generated by a1 alone
//   pink:s,r        a1 = s, a2 = (a1,1), a_{s+1} = (a_s,a_r), a_i = (a_{i-1},1)
//                   for the remaining 3 <= i <= r; requires 2 <= s < r, r >= 3
//   pink2s:s        pink:s,2s
// Parameters may be written `name:s,r` or `name(s,r)`.
// Throws domain_error for unknown names or bad parameters.
AutomatonSystem builtin_system(const std::string& name);

bool is_builtin_name(const std::string& name);

}  // namespace chainscope

#endif
