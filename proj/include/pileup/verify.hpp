#pragma once

// Self-verification suite: one check per module invariant.

#include <string>
#include <vector>

namespace pileup::verify {

struct Check {
  std::string module;
  std::string name;
  bool ok;
  std::string detail;
};

std::vector<Check> run_all(unsigned threads = 1);

}  // namespace pileup::verify
