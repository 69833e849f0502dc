#pragma once

#include <cstdint>

// Software FLOP tallies. Kernels report the number of floating-point
// operations they perform; the counter is per thread so that element loops
// run on different workers do not race.
namespace hyperfree::flops
{
#ifdef HYPERFREE_COUNT_FLOPS
inline thread_local std::uint64_t counter = 0;

inline void
add(const std::uint64_t n)
{
  counter += n;
}

inline std::uint64_t
count()
{
  return counter;
}

inline void
reset()
{
  counter = 0;
}

constexpr bool enabled = true;
#else
inline void
add(std::uint64_t)
{}

inline std::uint64_t
count()
{
  return 0;
}

inline void
reset()
{}

constexpr bool enabled = false;
#endif
} // namespace hyperfree::flops
