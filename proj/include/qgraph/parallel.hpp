#pragma once

#include <cstddef>

namespace qgraph {

// Execution policy for the grid kernels. Serial is the reference path; the
// parallel path must produce bitwise-identical results, which holds because
// every iteration writes its own slot and no reduction order changes.
enum class Exec { Serial, Parallel };

// Process-wide default; Parallel when OpenMP is compiled in, overridable via
// the QGRAPH_EXEC environment variable ("serial" / "parallel") or set_default_exec.
Exec default_exec();
void set_default_exec(Exec mode);

namespace detail {
bool openmp_enabled();
}

template <class Body>
void parallel_for(std::size_t n, Exec mode, const Body& body) {
  if (mode == Exec::Parallel && detail::openmp_enabled()) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace qgraph
