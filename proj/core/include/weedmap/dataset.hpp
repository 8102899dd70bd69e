#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "weedmap/features.hpp"

namespace weedmap {

using ClassCounts = std::array<std::size_t, kNumClasses>;

// Labeled parcel rows sharing one feature schema.
struct Dataset {
  std::vector<ParcelFeatureVector> rows;  // every row labeled
  std::vector<std::string> schema;

  std::size_t size() const { return rows.size(); }
  ClassCounts class_counts() const;
};

// Builds a dataset from labeled parcel vectors; rows without labels are
// rejected, as is any schema disagreement.
Dataset make_dataset(std::vector<ParcelFeatureVector> rows);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  // When set, membership in the test side is decided by hashing
  // (seed, parcel_id) instead of row positions, so runs over different
  // sensors of the same parcels reserve the same fields.
  bool by_parcel_hash = false;

  // round(test_fraction * count), clamped to [1, count-1] for count >= 2.
  std::size_t test_count_for(std::size_t class_count) const;
};

struct SplitResult {
  Dataset train;
  Dataset test;
};

// Per class, exactly SplitSpec::test_count_for(count) rows go to the test
// side, chosen uniformly at random under the seed. Throws ClassTooSmall
// when a present class has fewer than 2 rows.
SplitResult stratified_split(const Dataset& data, const SplitSpec& spec);

// Removes round(fraction * majority_count) uniformly random rows of the
// majority class, always leaving at least one. Ties between equally large
// classes resolve to the lower ordinal.
Dataset undersample_majority(const Dataset& train, double fraction,
                             std::uint64_t seed);

}  // namespace weedmap
