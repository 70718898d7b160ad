#include "ismm/rng.hpp"

#include <cmath>

namespace ismm {

double Rng::next_normal() {
  // Box-Muller, cosine branch only: two uniforms in, one normal out. Keeping
  // the draw count fixed per sample keeps substream alignment simple.
  double u1 = next_double();
  double u2 = next_double();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace ismm
