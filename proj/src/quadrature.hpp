#pragma once

#include <cstddef>
#include <vector>

namespace caustica::detail {

struct GaussRule {
  std::vector<double> nodes;    ///< on (-1, 1), ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, computed by Newton iteration on P_n.
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace caustica::detail
