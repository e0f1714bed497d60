#include "mrh/histogram.hpp"

#include <algorithm>
#include <cmath>

namespace mrh {

BinSpec make_bin_spec(double lo, double hi, std::uint32_t bins) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    raise(Errc::invalid_argument, "bin spec bounds must be finite");
  }
  if (lo > hi) {
    raise(Errc::invalid_argument, "bin spec lower bound exceeds upper bound");
  }
  if (bins == 0) {
    raise(Errc::invalid_argument, "bin spec needs at least one bin");
  }
  return BinSpec{lo, hi, bins};
}

std::uint32_t bin_count(double lo, double hi, double width) {
  if (!(width > 0.0)) {
    raise(Errc::invalid_argument, "bin width must be positive");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    raise(Errc::invalid_argument, "invalid range for bin count");
  }
  if (hi == lo) {
    return 1;  // degenerate range: one bin holding everything
  }
  const double t = std::ceil((hi - lo) / width);
  return static_cast<std::uint32_t>(t);
}

std::uint32_t bin_index(const BinSpec& spec, double sample) {
  if (!(sample > spec.lo)) {
    return 0;  // at-or-below range (and NaN) clamps low
  }
  if (sample >= spec.hi) {
    return spec.bins - 1;  // last bin is right-closed; above-range clamps high
  }
  const auto idx = static_cast<std::uint32_t>((sample - spec.lo) / spec.width());
  return std::min(idx, spec.bins - 1);
}

Histogram build_histogram(std::span<const float> samples, const BinSpec& spec) {
  if (spec.bins == 0 || spec.lo > spec.hi) {
    raise(Errc::invalid_argument, "invalid bin spec");
  }
  Histogram h;
  h.spec = spec;
  h.counts.assign(spec.bins, 0);
  for (float s : samples) {
    ++h.counts[bin_index(spec, static_cast<double>(s))];
  }
  h.total = samples.size();
  return h;
}

CumulativeHistogram cumulative(const Histogram& h) {
  CumulativeHistogram c;
  c.spec = h.spec;
  c.cumcounts.resize(h.counts.size());
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    running += h.counts[i];
    c.cumcounts[i] = running;
  }
  c.total = h.total;
  return c;
}

NormalizedHistogram normalize(const Histogram& h) {
  if (h.total == 0) {
    raise(Errc::empty_histogram, "cannot normalize an empty histogram");
  }
  NormalizedHistogram n;
  n.spec = h.spec;
  n.mass.resize(h.counts.size());
  const double inv = 1.0 / static_cast<double>(h.total);
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    n.mass[i] = static_cast<double>(h.counts[i]) * inv;
  }
  return n;
}

}  // namespace mrh
