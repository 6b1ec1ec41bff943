#include "rscert/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rscert/io_util.hpp"
#include "rscert/rng.hpp"

namespace rscert {

void Dataset::validate() const {
  if (n < 1) throw std::invalid_argument("dataset: must contain at least one sample");
  if (dim < 1) throw std::invalid_argument("dataset: feature dimension must be >= 1");
  if (num_classes < 1) throw std::invalid_argument("dataset: must declare at least one class");
  if (features.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("dataset: feature matrix size mismatch");
  }
  if (labels.size() != static_cast<std::size_t>(n) || ids.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("dataset: label/id count mismatch");
  }
  for (int label : labels) {
    if (label < 0 || label >= num_classes) {
      throw std::invalid_argument("dataset: label outside [0, num_classes)");
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("csv: bad numeric value for ") + what + ": " + s);
  }
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  int label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "label") label_col = static_cast<int>(i);
  }
  if (label_col < 0) throw std::runtime_error("csv: no `label` column in " + path);

  Dataset data;
  data.dim = static_cast<int>(header.size()) - 1;
  long long row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("csv: row with wrong number of fields in " + path);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == label_col) {
        const double v = parse_double(fields[i], "label");
        const int label = static_cast<int>(v);
        if (static_cast<double>(label) != v || label < 0) {
          throw std::runtime_error("csv: labels must be non-negative integers");
        }
        data.labels.push_back(label);
      } else {
        data.features.push_back(parse_double(fields[i], header[i].c_str()));
      }
    }
    data.ids.push_back("r" + std::to_string(row));
    ++row;
  }
  data.n = row;
  data.num_classes = data.labels.empty()
                         ? 0
                         : *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ostringstream out;
  out << "label";
  for (int j = 0; j < data.dim; ++j) out << ",f" << j;
  out << "\n";
  out.precision(17);
  for (long long i = 0; i < data.n; ++i) {
    out << data.labels[static_cast<std::size_t>(i)];
    for (double v : data.row(i)) out << ',' << v;
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw std::runtime_error("idx: truncated file: " + path);
  }
  return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream images(images_path, std::ios::binary);
  if (!images) throw std::runtime_error("cannot open idx image file: " + images_path);
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw std::runtime_error("cannot open idx label file: " + labels_path);

  if (read_be32(images, images_path) != 0x00000803u) {
    throw std::runtime_error("idx: bad image magic number in " + images_path);
  }
  const std::uint32_t count = read_be32(images, images_path);
  const std::uint32_t rows = read_be32(images, images_path);
  const std::uint32_t cols = read_be32(images, images_path);

  if (read_be32(labels, labels_path) != 0x00000801u) {
    throw std::runtime_error("idx: bad label magic number in " + labels_path);
  }
  if (read_be32(labels, labels_path) != count) {
    throw std::runtime_error("idx: image/label count mismatch");
  }

  Dataset data;
  data.n = count;
  data.dim = static_cast<int>(rows * cols);
  data.features.resize(static_cast<std::size_t>(count) * rows * cols);
  data.labels.resize(count);
  data.ids.reserve(count);

  std::vector<unsigned char> pixel_row(static_cast<std::size_t>(rows) * cols);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!images.read(reinterpret_cast<char*>(pixel_row.data()),
                     static_cast<std::streamsize>(pixel_row.size()))) {
      throw std::runtime_error("idx: truncated image data in " + images_path);
    }
    for (std::size_t j = 0; j < pixel_row.size(); ++j) {
      data.features[static_cast<std::size_t>(i) * pixel_row.size() + j] =
          static_cast<double>(pixel_row[j]);
    }
    char label = 0;
    if (!labels.read(&label, 1)) {
      throw std::runtime_error("idx: truncated label data in " + labels_path);
    }
    data.labels[i] = static_cast<unsigned char>(label);
    data.ids.push_back("i" + std::to_string(i));
  }
  data.num_classes = data.labels.empty()
                         ? 0
                         : *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  data.validate();
  return data;
}

Dataset make_blobs(const BlobSpec& spec) {
  if (spec.classes < 1) throw std::invalid_argument("blobs: need at least one class");
  if (spec.n < 1) throw std::invalid_argument("blobs: need at least one sample");
  if (spec.dim < 1) throw std::invalid_argument("blobs: need at least one dimension");
  if (spec.separation < 0.0) throw std::invalid_argument("blobs: separation must be >= 0");

  Dataset data;
  data.n = spec.n;
  data.dim = spec.dim;
  data.num_classes = spec.classes;
  data.features.reserve(static_cast<std::size_t>(spec.n) * static_cast<std::size_t>(spec.dim));
  data.labels.reserve(static_cast<std::size_t>(spec.n));
  data.ids.reserve(static_cast<std::size_t>(spec.n));

  for (long long i = 0; i < spec.n; ++i) {
    const int label = static_cast<int>(i % spec.classes);
    // Center for class c sits on axis (c mod dim), pushed out one extra
    // step per wrap so centers stay distinct when classes > dim.
    const int axis = label % spec.dim;
    const double radius = spec.separation * (1.0 + static_cast<double>(label / spec.dim));
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(i)));
    for (int j = 0; j < spec.dim; ++j) {
      const double center = (j == axis) ? radius : 0.0;
      data.features.push_back(center + rng.next_gaussian());
    }
    data.labels.push_back(label);
    data.ids.push_back("r" + std::to_string(i));
  }
  return data;
}

Dataset take_rows(const Dataset& data, std::span<const long long> rows) {
  Dataset out;
  out.dim = data.dim;
  out.num_classes = data.num_classes;
  out.n = static_cast<long long>(rows.size());
  for (long long r : rows) {
    if (r < 0 || r >= data.n) throw std::invalid_argument("take_rows: row index out of range");
    const auto row = data.row(r);
    out.features.insert(out.features.end(), row.begin(), row.end());
    out.labels.push_back(data.labels[static_cast<std::size_t>(r)]);
    out.ids.push_back(data.ids[static_cast<std::size_t>(r)]);
  }
  return out;
}

}  // namespace rscert
