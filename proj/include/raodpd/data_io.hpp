#pragma once

#include <iosfwd>
#include <string>

#include "raodpd/sample.hpp"

namespace raodpd {

// Parses whitespace/newline-separated decimal observations. Rejects empty
// input, non-numeric tokens (reported with line and token position) and
// non-finite values. Throws DataError.
Sample read_sample(std::istream& is, const std::string& origin = "<input>");

// Resolves `telephone` to the embedded dataset, anything else as a path.
Sample load_sample(const std::string& path_or_name);

// One observation per line at full round-trip precision.
void write_sample(std::ostream& os, const Sample& sample);

}  // namespace raodpd
