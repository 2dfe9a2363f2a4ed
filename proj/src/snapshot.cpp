#include "kgaug/snapshot.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kgaug::fusion {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace {

constexpr const char* kFormat = "kgaug-fusion-params/1";

const char* aggregation_name(Aggregation a) {
  return a == Aggregation::Sequential ? "sequential" : "literal_sum";
}

}  // namespace

void write_snapshot(const FusionParams& p, const std::filesystem::path& binary,
                    const std::filesystem::path& manifest) {
  p.validate();
  nlohmann::ordered_json m;
  m["format"] = kFormat;
  m["dtype"] = "float64";
  m["byte_order"] = "little";
  m["layout"] = "row-major";
  m["dims"] = {{"d1", p.dims.d1},         {"d2", p.dims.d2}, {"d3", p.dims.d3},
               {"d4", p.dims.d4},         {"layers", p.dims.layers},
               {"heads", p.dims.heads}};
  m["tau"] = p.tau;
  m["lambda_mlm"] = p.lambda_mlm;
  m["lambda_cl"] = p.lambda_cl;
  m["aggregation"] = aggregation_name(p.aggregation);

  std::ofstream bin(binary, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write '" + binary.string() + "'");
  std::size_t offset = 0;
  auto tensors = nlohmann::ordered_json::array();
  for (const auto& [name, mat] : named_tensors(p)) {
    tensors.push_back({{"name", name}, {"shape", {mat->rows(), mat->cols()}}, {"offset", offset}});
    for (Eigen::Index r = 0; r < mat->rows(); ++r) {
      for (Eigen::Index c = 0; c < mat->cols(); ++c) {
        const double v = (*mat)(r, c);
        bin.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
    }
    offset += static_cast<std::size_t>(mat->size());
  }
  m["tensors"] = std::move(tensors);
  m["elements"] = offset;

  std::ofstream js(manifest);
  if (!js) throw std::runtime_error("cannot write '" + manifest.string() + "'");
  js << m.dump(2) << '\n';
}

FusionParams read_snapshot(const std::filesystem::path& binary,
                           const std::filesystem::path& manifest) {
  std::ifstream js(manifest);
  if (!js) throw std::runtime_error("cannot open '" + manifest.string() + "'");
  const auto m = nlohmann::json::parse(js);
  if (m.at("format") != kFormat) throw std::runtime_error("unrecognized snapshot format");

  FusionDims dims;
  const auto& d = m.at("dims");
  dims.d1 = d.at("d1");
  dims.d2 = d.at("d2");
  dims.d3 = d.at("d3");
  dims.d4 = d.at("d4");
  dims.layers = d.at("layers");
  dims.heads = d.at("heads");
  FusionParams p = FusionParams::init(dims, 0);
  p.tau = m.at("tau");
  p.lambda_mlm = m.at("lambda_mlm");
  p.lambda_cl = m.at("lambda_cl");
  p.aggregation = m.at("aggregation") == "literal_sum" ? Aggregation::LiteralSum
                                                        : Aggregation::Sequential;

  std::ifstream bin(binary, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open '" + binary.string() + "'");
  std::vector<double> values(m.at("elements").get<std::size_t>());
  bin.read(reinterpret_cast<char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
    throw std::runtime_error("snapshot binary is shorter than its manifest");
  }

  auto tensors = named_tensors(p);
  const auto& listed = m.at("tensors");
  if (listed.size() != tensors.size()) throw std::runtime_error("snapshot tensor count mismatch");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& [name, mat] = tensors[i];
    const auto& entry = listed[i];
    if (entry.at("name") != name) {
      throw std::runtime_error("snapshot tensor " + std::to_string(i) + " is '" +
                               entry.at("name").get<std::string>() + "', expected '" + name + "'");
    }
    const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
    nn::check_shape(*mat, shape.at(0), shape.at(1), "snapshot tensor " + name);
    std::size_t at = entry.at("offset");
    for (Eigen::Index r = 0; r < mat->rows(); ++r) {
      for (Eigen::Index c = 0; c < mat->cols(); ++c) (*mat)(r, c) = values.at(at++);
    }
  }
  p.validate();
  return p;
}

}  // namespace kgaug::fusion
