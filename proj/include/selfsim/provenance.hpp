#pragma once

#include <map>
#include <string>

namespace selfsim {

/// Which construction produced an object, with every scalar parameter it used.
struct Provenance {
  std::string construction;
  std::map<std::string, double> params;
  std::map<std::string, std::string> notes;
};

}  // namespace selfsim
