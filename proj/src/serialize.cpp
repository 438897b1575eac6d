#include "advparam/errors.hpp"
#include "advparam/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace advparam {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j, Index expected, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array", 0);
  if (static_cast<Index>(j.size()) != expected)
    throw ShapeError(std::string(what) + " has the wrong length");
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

template <class T>
T field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("missing field '") + key + "'", 0);
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field '") + key + "': " + e.what(), 0);
  }
}

}  // namespace

json model_to_json(const ModelParams& params, const json& metadata) {
  params.validate();
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["dims"] = params.dims();
  json layers = json::array();
  for (const auto& l : params.layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weight.size()));
    for (Index r = 0; r < l.weight.rows(); ++r)
      for (Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    layers.push_back({{"w", w}, {"b", vector_json(l.bias)}});
  }
  doc["layers"] = layers;
  if (!metadata.is_null()) doc["metadata"] = metadata;
  return doc;
}

ModelParams model_from_json(const json& doc) {
  if (field<int>(doc, "version") != kModelFormatVersion)
    throw FormatError("unsupported model format version", 0);
  const auto dims = field<std::vector<Index>>(doc, "dims");
  const json& layers = doc.at("layers");
  if (dims.size() < 2 || layers.size() + 1 != dims.size())
    throw FormatError("layer count does not match dims", 0);
  ModelParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Index rows = dims[l + 1], cols = dims[l];
    const Vector flat = vector_from(layers[l].at("w"), rows * cols, "w");
    Layer layer;
    layer.weight.resize(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) layer.weight(r, c) = flat(r * cols + c);
    layer.bias = vector_from(layers[l].at("b"), rows, "b");
    p.layers.push_back(std::move(layer));
  }
  p.validate();
  return p;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what(), e.byte);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

void save_model(const ModelParams& params, const std::filesystem::path& path, const json& metadata) {
  write_text(path, model_to_json(params, metadata).dump(1) + "\n");
}

ModelParams load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

json dataset_to_json(const LabeledDataset& data) {
  json doc;
  doc["version"] = kDatasetFormatVersion;
  doc["name"] = data.name;
  doc["dim"] = data.dim;
  doc["classes"] = data.classes;
  doc["seed"] = data.seed;
  doc["source"] = data.source;
  doc["intrinsic_dim"] = data.intrinsic_dim ? json(*data.intrinsic_dim) : json(nullptr);
  json samples = json::array();
  for (const auto& s : data.samples) samples.push_back({{"x", vector_json(s.x)}, {"label", s.label}});
  doc["samples"] = samples;
  return doc;
}

LabeledDataset dataset_from_json(const json& doc) {
  if (field<int>(doc, "version") != kDatasetFormatVersion)
    throw FormatError("unsupported dataset format version", 0);
  LabeledDataset d;
  d.name = field<std::string>(doc, "name");
  d.dim = field<Index>(doc, "dim");
  d.classes = field<int>(doc, "classes");
  d.seed = field<std::uint64_t>(doc, "seed");
  d.source = field<std::string>(doc, "source");
  if (doc.contains("intrinsic_dim") && !doc["intrinsic_dim"].is_null())
    d.intrinsic_dim = doc["intrinsic_dim"].get<int>();
  for (const auto& s : doc.at("samples"))
    d.samples.push_back({vector_from(s.at("x"), d.dim, "x"), s.at("label").get<int>()});
  d.validate();
  return d;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  write_text(path, dataset_to_json(data).dump() + "\n");
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_json(path));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string robustness_csv_header() {
  return "dataset,n_samples,acc,adv_acc,eps,avg_r2,dist_measure,seed";
}

std::string robustness_csv_row(const RobustnessReport& r) {
  std::ostringstream os;
  os << r.dataset << ',' << r.n_samples << ',' << format_double(r.accuracy) << ','
     << format_double(r.adversarial_accuracy) << ',' << format_double(r.eps) << ','
     << format_double(r.avg_radius.mean) << ','
     << (r.dist_measure ? format_double(*r.dist_measure) : "undefined") << ',' << r.seed;
  return os.str();
}

json robustness_to_json(const RobustnessReport& r) {
  json doc;
  doc["dataset"] = r.dataset;
  doc["n_samples"] = r.n_samples;
  doc["acc"] = r.accuracy;
  doc["adv_acc"] = r.adversarial_accuracy;
  doc["eps"] = r.eps;
  doc["avg_r2"] = r.avg_radius.mean;
  doc["avg_r2_counted"] = r.avg_radius.counted;
  doc["avg_r2_unbounded"] = r.avg_radius.unbounded;
  doc["dist_measure"] = r.dist_measure ? json(*r.dist_measure) : json(nullptr);
  doc["seed"] = r.seed;
  doc["pgd"] = {{"eps", r.pgd.eps}, {"steps", r.pgd.steps}, {"step", r.pgd.step}};
  json radii = json::array(), margins = json::array();
  for (const auto& e : r.radii) radii.push_back(e.unbounded ? json(nullptr) : json(e.value));
  for (const auto& e : r.squared_margins)
    margins.push_back(e.unbounded ? json(nullptr) : json(e.value));
  doc["radii"] = radii;
  doc["squared_margins"] = margins;
  return doc;
}

void write_trace_csv(const std::vector<TracePoint>& trace, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "iter,phase,loss,acc,adv_acc\n";
  for (const auto& t : trace)
    os << t.iter << ',' << t.phase << ',' << format_double(t.loss) << ',' << format_double(t.acc)
       << ',' << format_double(t.adv_acc) << '\n';
  write_text(path, os.str());
}

}  // namespace advparam
