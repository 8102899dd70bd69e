#pragma once

#include <vector>

#include "weedmap/core.hpp"

namespace weedmap {

// Regular sampling grid over the observation window: start + k*step_days
// for k in [0, n_steps).
struct TimeGrid {
  Date start{};
  int step_days = 10;
  std::size_t n_steps = 0;

  Date date_at(std::size_t k) const { return add_days(start, k * step_days); }

  std::vector<Date> dates() const {
    std::vector<Date> out;
    out.reserve(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) out.push_back(date_at(k));
    return out;
  }
};

// Grid covering [window_start, window_end]: first date = window_start,
// last date <= window_end. Throws EmptyWindow when the window is inverted
// or empty.
TimeGrid build_grid(Date window_start, Date window_end, int step_days = 10);

struct CloudFilterResult {
  std::vector<SpectralObservation> kept;  // input order preserved
  std::size_t removed = 0;
  // Pixels whose observations were all removed; callers surface these as
  // warnings rather than failures.
  std::vector<std::string> all_cloudy_pixels;
};

// Keeps observations with cloud_fraction <= threshold (strictly-greater
// values are excluded, so a fraction equal to the threshold is retained).
CloudFilterResult filter_cloudy(const std::vector<SpectralObservation>& observations,
                                double threshold = 0.005);

// Linear interpolation of an irregular series onto the grid. Grid dates
// outside the observed range take the nearest observed value (constant
// extension). Throws EmptySeries when there is nothing to interpolate.
TimeSeries interpolate_to_grid(const TimeSeries& series, const TimeGrid& grid);

}  // namespace weedmap
