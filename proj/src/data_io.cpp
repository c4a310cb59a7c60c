#include "raodpd/data_io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "raodpd/errors.hpp"
#include "raodpd/normal.hpp"

namespace raodpd {

Sample read_sample(std::istream& is, const std::string& origin) {
  std::vector<double> obs;
  std::string line;
  int line_no = 0;
  int token_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      ++token_no;
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size() || errno == ERANGE)
        throw DataError(origin + ": parse error at line " +
                        std::to_string(line_no) + ", token " +
                        std::to_string(token_no) + " ('" + token + "')");
      if (!std::isfinite(v))
        throw DataError(origin + ": non-finite value at line " +
                        std::to_string(line_no) + ", token " +
                        std::to_string(token_no));
      obs.push_back(v);
    }
  }
  if (obs.empty()) throw DataError(origin + ": empty input");
  return Sample(std::move(obs));
}

Sample load_sample(const std::string& path_or_name) {
  if (path_or_name == "telephone") return telephone_data();
  std::ifstream file(path_or_name);
  if (!file) throw DataError(path_or_name + ": cannot open file");
  return read_sample(file, path_or_name);
}

void write_sample(std::ostream& os, const Sample& sample) {
  char buf[64];
  for (double v : sample) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    os << buf;
  }
}

}  // namespace raodpd
