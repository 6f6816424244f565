#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dualcert/montecarlo.hpp"

namespace dualcert::cli {

// Exit codes: 0 ok/certified/recovered, 1 error, 2 not certified/recovered
// or bound violations, 3 solver unconverged.
int run(int argc, const char* const* argv);

/// Fixed sweep CSV schema. Absent parameters are empty fields; reals carry
/// 9 significant digits.
std::string csv_header();
std::string csv_row(const mc::SweepRow& row);
void write_csv(std::ostream& out, const std::vector<mc::SweepRow>& rows);

}  // namespace dualcert::cli
