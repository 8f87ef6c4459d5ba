#pragma once

#include <map>
#include <string>
#include <string_view>

#include "prophic/sts.hpp"

namespace prophic {

struct VmtDocument
{
  TransitionSystem system;
  std::map<int, Property> properties;  // keyed by :invar-property index
};

/// Parses a VMT script (SMT-LIB 2 with :next/:init/:trans/:invar-property
/// annotations). Declared constants without a :next partner become inputs.
VmtDocument parse_vmt(TermStore & store, std::string_view text);

/// Serializes a system and one property (as property 0).
std::string emit_vmt(const TransitionSystem & s, const Property & p);

}  // namespace prophic
