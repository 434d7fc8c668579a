#include "gptdetox/util.hpp"

#include <cmath>
#include <cstdio>

namespace gptdetox {

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

double round2(double value) {
  return std::floor(value * 100.0 + 0.5) / 100.0;
}

std::string format2(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", round2(value));
  return std::string(buf);
}

}  // namespace gptdetox
