//---------------------------------------------------------------------------//
/*!
 * \file knt/parallel.hpp
 * \brief Deterministic static-partition parallel loop.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <functional>

namespace knt
{
//! Process-wide default worker count (1 unless changed).
int default_threads();
void set_default_threads(int n);

/*!
 * Call body(i) for i in [0, n) using up to \c threads workers.
 *
 * Each index is handled by exactly one worker and bodies must write only to
 * disjoint locations, so results do not depend on the thread count. The
 * first exception thrown by any body is rethrown on the caller.
 */
void parallel_for(std::size_t n, std::function<void(std::size_t)> const& body,
                  int threads = 0);

}  // namespace knt
