#pragma once

#include <string>

#include "cadlagqv/partition.hpp"
#include "cadlagqv/path.hpp"

namespace cadlag {

// CSV exchange format for paths. Header `t,v` for scalar paths and
// `t,v1,...,vm` for vector paths; rows sorted by t; a repeated time encodes
// a jump as the pair (left limit row, value row), in that order. A time
// appearing three times has no cadlag reading and is rejected. Values are
// parsed as binary doubles; the writers emit round-trip precision, so a
// written path reads back knot for knot. The last row's time is the
// horizon.
//
// Everything wrong with the text itself (bad header, unparseable number,
// unsorted or triple-repeated times, ragged rows) and every path invariant
// the decoded knots violate surfaces as format_error.

CadlagPath read_path_csv(const std::string& text);
VectorCadlagPath read_vector_path_csv(const std::string& text);

std::string write_path_csv(const CadlagPath& x);
std::string write_vector_path_csv(const VectorCadlagPath& x);

// Explicit partition levels, one per line, comma-separated times. Lines must
// share a horizon and refine in mesh; level k of the returned scheme is line
// k, counted from 0.
PartitionScheme read_scheme_csv(const std::string& text);

// Whole-file helpers for the CLI. Open and write failures are reported as
// format_error, naming the file.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cadlag
