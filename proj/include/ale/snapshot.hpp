#pragma once

#include <iosfwd>
#include <string>

#include "ale/model.hpp"

namespace ale {

// Flat text snapshot of a fitted model:
//
//   ale-params 1
//   spec <variant> al=<0|1> in=<0|1> g=<0|1> student_group=<..> course_group=<..> ck_normalization=<..>
//   k <k>
//   seed <seed>
//   decay <lambda>
//   global_mean <mean>
//   vocab <student|course|instructor|major|subject> <index> <id>
//   table <family> <rows> <cols>
//   <family> <entity_index> v1 ... vcols
//
// Reals are written in shortest round-trip form, so read(write(p)) == p bit
// for bit.
void write_snapshot(std::ostream& out, const ModelParams& params);
ModelParams read_snapshot(std::istream& in);

void save_snapshot(const std::string& path, const ModelParams& params);
ModelParams load_snapshot(const std::string& path);

/// Shortest decimal form of `v` that parses back to the same double.
std::string format_real(double v);
double parse_real(std::string_view token);

}  // namespace ale
