#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "combasym/numeric.hpp"

namespace combasym {

// Exit statuses of run().
enum ExitStatus {
  kExitOk = 0,
  kExitInvalid = 1,         // parse or validation error
  kExitNotWellFounded = 2,
  kExitSuperpolynomial = 3,  // asympt on an EXP coordinate
  kExitPrecision = 4,
};

// combasym <command> [options] file.spec; args excludes the program name.
// Reports go to `out`, diagnostics to `err`. With --json, error reports are also JSON on `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Decimal rendering of x with `digits` significant digits, rounded toward -inf (dir < 0),
// +inf (dir > 0) or to nearest.
std::string decimal(const Real& x, int digits, int dir = 0);

}  // namespace combasym
