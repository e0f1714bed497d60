#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mrh/error.hpp"

namespace mrh {

// Equal-width binning of the amplitude range [lo, hi] into `bins` intervals.
// Bin i (0-based) covers [lo + i*w, lo + (i+1)*w) with the last bin closed on
// the right; w = (hi - lo) / bins.
struct BinSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::uint32_t bins = 1;

  double width() const { return (hi - lo) / static_cast<double>(bins); }
  bool operator==(const BinSpec&) const = default;
};

// Validates range and bin count. Raises invalid_argument on lo > hi,
// non-finite bounds, or bins == 0.
BinSpec make_bin_spec(double lo, double hi, std::uint32_t bins);

// Number of bins a recommended width implies: ceil((hi - lo) / w), or 1 for
// a degenerate range. Raises invalid_argument when w <= 0 or hi < lo.
std::uint32_t bin_count(double lo, double hi, double width);

// Bin receiving a sample. Out-of-range samples clamp to the boundary bins so
// every sample lands somewhere; NaN clamps low.
std::uint32_t bin_index(const BinSpec& spec, double sample);

struct Histogram {
  BinSpec spec;
  std::vector<std::uint64_t> counts;  // one per bin
  std::uint64_t total = 0;            // number of samples binned

  bool operator==(const Histogram&) const = default;
};

struct CumulativeHistogram {
  BinSpec spec;
  std::vector<std::uint64_t> cumcounts;  // non-decreasing; back() == total
  std::uint64_t total = 0;

  bool operator==(const CumulativeHistogram&) const = default;
};

// Bin masses summing to 1; counts divided by the sample count.
struct NormalizedHistogram {
  BinSpec spec;
  std::vector<double> mass;

  bool operator==(const NormalizedHistogram&) const = default;
};

// Counts every sample into exactly one bin (clamping out-of-range values).
// An empty input yields all-zero counts.
Histogram build_histogram(std::span<const float> samples, const BinSpec& spec);

CumulativeHistogram cumulative(const Histogram& h);

// Raises empty_histogram when h.total == 0.
NormalizedHistogram normalize(const Histogram& h);

}  // namespace mrh
