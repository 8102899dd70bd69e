#include "weedmap/preprocess.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace weedmap {

TimeGrid build_grid(Date window_start, Date window_end, int step_days) {
  if (step_days < 1) {
    throw Error(ErrorCode::ConfigError,
                "grid step must be >= 1 day, got " + std::to_string(step_days));
  }
  long span = days_between(window_start, window_end);
  if (span < 0) {
    throw Error(ErrorCode::EmptyWindow,
                "window end " + format_date(window_end) + " precedes start " +
                    format_date(window_start));
  }
  TimeGrid grid;
  grid.start = window_start;
  grid.step_days = step_days;
  grid.n_steps = static_cast<std::size_t>(span / step_days) + 1;
  return grid;
}

CloudFilterResult filter_cloudy(const std::vector<SpectralObservation>& observations,
                                double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw Error(ErrorCode::FractionOutOfRange,
                "cloud threshold " + std::to_string(threshold) + " not in [0,1]");
  }
  CloudFilterResult result;
  result.kept.reserve(observations.size());
  std::unordered_map<std::string, bool> pixel_has_clear;
  for (const auto& obs : observations) {
    bool clear = !(obs.cloud_fraction > threshold);
    auto [it, _] = pixel_has_clear.try_emplace(obs.pixel_id, false);
    if (clear) {
      it->second = true;
      result.kept.push_back(obs);
    } else {
      ++result.removed;
    }
  }
  for (const auto& obs : observations) {
    auto it = pixel_has_clear.find(obs.pixel_id);
    if (it != pixel_has_clear.end() && !it->second) {
      result.all_cloudy_pixels.push_back(obs.pixel_id);
      pixel_has_clear.erase(it);  // report each pixel once, in input order
    }
  }
  return result;
}

TimeSeries interpolate_to_grid(const TimeSeries& series, const TimeGrid& grid) {
  validate_time_series(series);
  if (series.empty()) {
    throw Error(ErrorCode::EmptySeries, "no observations left to interpolate");
  }

  TimeSeries out;
  out.dates = grid.dates();
  out.values.reserve(grid.n_steps);

  std::size_t hi = 0;  // first observation with date >= grid date
  for (Date target : out.dates) {
    while (hi < series.size() && series.dates[hi] < target) ++hi;
    if (hi == 0) {
      out.values.push_back(series.values.front());
    } else if (hi == series.size()) {
      out.values.push_back(series.values.back());
    } else if (series.dates[hi] == target) {
      out.values.push_back(series.values[hi]);
    } else {
      const Date t0 = series.dates[hi - 1];
      const Date t1 = series.dates[hi];
      const double v0 = series.values[hi - 1];
      const double v1 = series.values[hi];
      const double w = static_cast<double>(days_between(t0, target)) /
                       static_cast<double>(days_between(t0, t1));
      out.values.push_back(v0 + w * (v1 - v0));
    }
  }
  return out;
}

}  // namespace weedmap
