#pragma once

// Index loops that run either serially or under OpenMP. Exceptions thrown by
// the body are captured and the first one (lowest index) is rethrown after
// the loop, so both modes fail identically.

#include <cstddef>
#include <exception>
#include <vector>

#include "caustica/spectrum.hpp"

namespace caustica {

template <typename Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace caustica
