#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arcs/dense.hpp"

namespace arcs {

struct Dataset {
  std::string name;
  std::vector<Vector> inputs;
  std::vector<int> labels;       ///< class indices; empty for pure regression
  std::vector<Vector> targets;   ///< regression targets; empty for classification
  std::size_t num_classes = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  std::size_t size() const { return inputs.size(); }
  std::size_t input_dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

/// Throws std::invalid_argument if feature widths differ, labels are out of
/// range, or the split is not a disjoint cover of the rows.
void validate(const Dataset& ds);

/// Per-class seeded shuffle, then the first round(test_fraction * class_size)
/// rows of each class go to the test split.
void stratified_split(Dataset& ds, double test_fraction, std::uint64_t seed);
/// Seeded shuffle of all rows, then a test_fraction tail.
void random_split(Dataset& ds, double test_fraction, std::uint64_t seed);

/// IRIS CSV: four numeric features then a class name, comma separated. A
/// non-numeric first row is treated as a header. Class ids follow order of
/// first appearance. Returns a stratified 80/20 split.
Dataset load_iris(const std::filesystem::path& path, std::uint64_t split_seed);

/// IDX image/label pair (magic 0x00000803 / 0x00000801, big-endian).
/// Pixels are scaled to [0, 1]; `limit` > 0 caps the number of rows. No split.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t limit = 0);

struct BlobSpec {
  std::size_t classes = 2;
  std::size_t per_class = 100;
  std::size_t dim = 2;
  double separation = 6.0;  ///< distance of class centers from the origin
  double stddev = 1.0;
  std::uint64_t seed = 0;
};

/// Isotropic Gaussian clusters with centers on +-separation along the axes.
/// Comes with a stratified 80/20 split.
Dataset synth_blobs(const BlobSpec& spec);

/// Average-pools square images of side `side` by an integer factor.
void downsample_images(Dataset& ds, std::size_t side, std::size_t factor);

/// z-scores every feature with training-split statistics.
void standardize(Dataset& ds);

/// Turns an image set into a reconstruction task: targets = inputs.
void make_autoencoder(Dataset& ds);

/// $ARCS_DATA_DIR if set, otherwise `fallback`.
std::filesystem::path data_dir(const std::filesystem::path& fallback);

}  // namespace arcs
