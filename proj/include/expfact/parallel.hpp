#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <utility>

#include "expfact/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace expfact {

// Execution policy for per-sample sweeps. Every kernel is a pure function of
// one sample, so the parallel path only partitions the index range; results
// are bitwise identical to the serial reference, which tests assert.
enum class Exec { Serial, Parallel };

template <class F>
void for_each_sample(std::size_t count, Exec exec, F&& fn) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
      fn(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
  }
}

// Same sweep, but body exceptions are captured and rethrown after the loop.
// When several samples fail the one with the smallest index wins, so failure
// reports do not depend on the schedule.
template <class F>
void for_each_sample_checked(std::size_t count, Exec exec, F&& fn) {
  std::optional<Error> first;
  std::size_t first_index = count;
  std::mutex guard;
  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(guard);
      if (i < first_index) {
        first_index = i;
        first = e;
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(guard);
      if (i < first_index) {
        first_index = i;
        first = Error(ErrorCode::NumericalError, e.what(), i);
      }
    }
  };
  for_each_sample(count, exec, body);
  if (first) throw *first;
}

}  // namespace expfact
