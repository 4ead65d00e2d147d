#include "holisticbias/hash.hpp"

#include <cmath>

namespace hb {

double standard_normal(std::uint64_t h1, std::uint64_t h2) {
  const double u1 = unit_interval(h1);
  const double u2 = unit_interval(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace hb
