#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rmdp {

/**
 * Savitzky-Golay smoothing: each point is replaced by the value at that point
 * of the least-squares polynomial of degree `poly_order` fitted over a
 * centered window. The first and last window/2 points use the fit over the
 * first and last full window, so polynomials of degree <= poly_order pass
 * through unchanged everywhere.
 *
 * Requires an odd window, window > poly_order, and series.size() >= window.
 */
std::vector<double> savitzky_golay_smooth(std::span<const double> series, std::size_t window,
                                          std::size_t poly_order);

} // namespace rmdp
