#pragma once

// Plain-text array format:
//
//   K'=4 t=2 L=3 K=8 F=48 S=32
//   C
//   <F lines of K entries, '*' or '.'>
//   U
//   <F lines of K entries, '*' or '.'>
//   Q
//   <F lines of K entries, '*' or ({a,b,c},g)>
//
// Entries are separated by single spaces, rows follow the canonical row
// order, every line ends with '\n'. write_arrays(read_arrays(x)) == x.

#include <iosfwd>
#include <string>

#include "macc/scheme.hpp"

namespace macc {

std::string header_line(const LevelParams& p);

void write_arrays(std::ostream& out, const SchemeArrays& arrays);
std::string write_arrays(const SchemeArrays& arrays);

/// Throws InvalidArgument with the offending line number on malformed input.
SchemeArrays read_arrays(std::istream& in);
SchemeArrays read_arrays(const std::string& text);

}  // namespace macc
