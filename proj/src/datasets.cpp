#include "arcs/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arcs/errors.hpp"

namespace arcs {

void validate(const Dataset& ds) {
  const std::size_t d = ds.input_dim();
  for (const auto& x : ds.inputs)
    if (x.size() != d) throw std::invalid_argument(ds.name + ": ragged feature rows");
  if (!ds.labels.empty()) {
    if (ds.labels.size() != ds.size()) throw std::invalid_argument(ds.name + ": label count");
    for (int l : ds.labels)
      if (l < 0 || static_cast<std::size_t>(l) >= ds.num_classes)
        throw std::invalid_argument(ds.name + ": label out of range");
  }
  if (!ds.targets.empty() && ds.targets.size() != ds.size())
    throw std::invalid_argument(ds.name + ": target count");
  std::vector<int> seen(ds.size(), 0);
  for (std::size_t i : ds.train) {
    if (i >= ds.size()) throw std::invalid_argument(ds.name + ": split index out of range");
    ++seen[i];
  }
  for (std::size_t i : ds.test) {
    if (i >= ds.size()) throw std::invalid_argument(ds.name + ": split index out of range");
    ++seen[i];
  }
  if (!ds.train.empty() || !ds.test.empty())
    for (int c : seen)
      if (c != 1) throw std::invalid_argument(ds.name + ": split is not a disjoint cover");
}

void stratified_split(Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (ds.labels.empty()) throw std::invalid_argument("stratified_split: dataset has no labels");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);
  ds.train.clear();
  ds.test.clear();
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * rows.size()));
    ds.test.insert(ds.test.end(), rows.begin(), rows.begin() + n_test);
    ds.train.insert(ds.train.end(), rows.begin() + n_test, rows.end());
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
}

void random_split(Dataset& ds, double test_fraction, std::uint64_t seed) {
  std::vector<std::size_t> rows(ds.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * rows.size()));
  ds.train.assign(rows.begin(), rows.end() - n_test);
  ds.test.assign(rows.end() - n_test, rows.end());
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

Dataset load_iris(const std::filesystem::path& path, std::uint64_t split_seed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  Dataset ds;
  ds.name = "iris";
  std::map<std::string, int> class_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);
    Vector x(4);
    bool numeric = fields.size() == 5;
    for (std::size_t j = 0; numeric && j < 4; ++j) numeric = parse_double(fields[j], x[j]);
    if (!numeric) {
      if (ds.inputs.empty() && class_ids.empty() && line_no == 1) continue;  // header
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected four numbers and a class name");
    }
    const auto [it, inserted] = class_ids.emplace(fields[4], static_cast<int>(class_ids.size()));
    ds.inputs.push_back(std::move(x));
    ds.labels.push_back(it->second);
  }
  ds.num_classes = class_ids.size();
  if (ds.inputs.empty()) throw ParseError(path.string() + ": no data rows");
  stratified_split(ds, 0.2, split_seed);
  validate(ds);
  return ds;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& name, std::size_t offset) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw ParseError(name + ": truncated header at byte " + std::to_string(offset));
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t limit) {
  std::ifstream img(images, std::ios::binary);
  if (!img) throw ParseError("cannot open " + images.string());
  std::ifstream lab(labels, std::ios::binary);
  if (!lab) throw ParseError("cannot open " + labels.string());
  const std::string iname = images.string();
  const std::string lname = labels.string();

  if (const auto magic = read_be32(img, iname, 0); magic != 0x00000803)
    throw ParseError(iname + ": bad magic at byte 0");
  const std::uint32_t count = read_be32(img, iname, 4);
  const std::uint32_t rows = read_be32(img, iname, 8);
  const std::uint32_t cols = read_be32(img, iname, 12);
  if (const auto magic = read_be32(lab, lname, 0); magic != 0x00000801)
    throw ParseError(lname + ": bad magic at byte 0");
  const std::uint32_t label_count = read_be32(lab, lname, 4);
  if (label_count != count)
    throw ParseError(lname + ": label count at byte 4 does not match image count");

  const std::size_t n = limit > 0 ? std::min<std::size_t>(limit, count) : count;
  const std::size_t pixels = std::size_t{rows} * cols;
  Dataset ds;
  ds.name = "idx";
  ds.inputs.reserve(n);
  std::vector<unsigned char> buf(pixels);
  int max_label = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
      throw ParseError(iname + ": truncated image data at byte " +
                       std::to_string(16 + i * pixels));
    Vector x(pixels);
    for (std::size_t p = 0; p < pixels; ++p) x[p] = buf[p] / 255.0;
    ds.inputs.push_back(std::move(x));
    unsigned char l = 0;
    if (!lab.read(reinterpret_cast<char*>(&l), 1))
      throw ParseError(lname + ": truncated label data at byte " + std::to_string(8 + i));
    ds.labels.push_back(l);
    max_label = std::max(max_label, static_cast<int>(l));
  }
  ds.num_classes = static_cast<std::size_t>(max_label + 1);
  return ds;
}

Dataset synth_blobs(const BlobSpec& spec) {
  if (spec.classes < 2 || spec.dim == 0 || spec.per_class == 0)
    throw std::invalid_argument("synth_blobs: need >= 2 classes, dim > 0, per_class > 0");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.stddev);
  Dataset ds;
  ds.name = "blobs";
  ds.num_classes = spec.classes;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    Vector center(spec.dim, 0.0);
    center[(c / 2) % spec.dim] = (c % 2 == 0 ? 1.0 : -1.0) * spec.separation;
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      Vector x = center;
      for (double& v : x) v += noise(rng);
      ds.inputs.push_back(std::move(x));
      ds.labels.push_back(static_cast<int>(c));
    }
  }
  stratified_split(ds, 0.2, spec.seed + 1);
  validate(ds);
  return ds;
}

void downsample_images(Dataset& ds, std::size_t side, std::size_t factor) {
  if (factor == 0 || side % factor != 0)
    throw std::invalid_argument("downsample_images: side must be divisible by factor");
  const std::size_t out = side / factor;
  const double norm = 1.0 / static_cast<double>(factor * factor);
  for (auto& x : ds.inputs) {
    if (x.size() != side * side) throw std::invalid_argument("downsample_images: image size");
    Vector y(out * out, 0.0);
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c) y[(r / factor) * out + c / factor] += x[r * side + c];
    for (double& v : y) v *= norm;
    x = std::move(y);
  }
}

void standardize(Dataset& ds) {
  const std::size_t d = ds.input_dim();
  const auto& rows = ds.train.empty() ? std::vector<std::size_t>{} : ds.train;
  const std::size_t n = rows.empty() ? ds.size() : rows.size();
  Vector mean(d, 0.0), var(d, 0.0);
  auto row = [&](std::size_t i) -> const Vector& { return ds.inputs[rows.empty() ? i : rows[i]]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += row(i)[j] / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row(i)[j] - mean[j];
      var[j] += c * c / static_cast<double>(n);
    }
  for (auto& x : ds.inputs)
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j]);
      x[j] = (x[j] - mean[j]) / (sd > 0.0 ? sd : 1.0);
    }
}

void make_autoencoder(Dataset& ds) { ds.targets = ds.inputs; }

std::filesystem::path data_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("ARCS_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return fallback;
}

}  // namespace arcs
