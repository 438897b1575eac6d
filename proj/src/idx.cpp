#include "advparam/errors.hpp"
#include "advparam/io.hpp"

#include <fstream>
#include <iterator>

namespace advparam {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_++]);
    return v;
  }

  unsigned char u8(const char* what) {
    need(1, what);
    return static_cast<unsigned char>(bytes_[pos_++]);
  }

  void need(std::uint64_t n, const char* what) const {
    if (bytes_.size() - pos_ < n)
      throw FormatError(std::string("truncated IDX file while reading ") + what, pos_);
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw FormatError("trailing bytes after IDX payload", pos_);
  }

  std::uint64_t pos() const { return pos_; }

 private:
  std::vector<char> bytes_;
  std::uint64_t pos_ = 0;
};

}  // namespace

std::vector<Vector> read_idx_images(const std::filesystem::path& path) {
  ByteReader r(path);
  if (r.u32("magic") != kImageMagic) throw FormatError("bad IDX image magic", 0);
  const std::uint32_t count = r.u32("image count");
  const std::uint32_t rows = r.u32("row count");
  const std::uint32_t cols = r.u32("column count");
  const std::uint64_t pixels = std::uint64_t{rows} * cols;
  r.need(pixels * count, "pixels");
  std::vector<Vector> out(count, Vector(static_cast<Index>(pixels)));
  for (auto& img : out)
    for (Index i = 0; i < img.size(); ++i) img(i) = r.u8("pixel") / 255.0;
  r.expect_end();
  return out;
}

std::vector<int> read_idx_labels(const std::filesystem::path& path) {
  ByteReader r(path);
  if (r.u32("magic") != kLabelMagic) throw FormatError("bad IDX label magic", 0);
  const std::uint32_t count = r.u32("label count");
  r.need(count, "labels");
  std::vector<int> out(count);
  for (auto& l : out) l = r.u8("label");
  r.expect_end();
  return out;
}

LabeledDataset read_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  auto xs = read_idx_images(images);
  const auto ls = read_idx_labels(labels);
  // Offset 4 is where both headers store their counts.
  if (xs.size() != ls.size()) throw FormatError("image and label counts differ", 4);
  if (xs.empty()) throw FormatError("IDX files contain no samples", 4);
  LabeledDataset d;
  d.name = images.stem().string();
  d.source = images.string();
  d.dim = xs.front().size();
  int max_label = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d.samples.push_back({std::move(xs[i]), ls[i]});
    max_label = std::max(max_label, ls[i]);
  }
  d.classes = std::max(2, max_label + 1);
  return d;
}

}  // namespace advparam
