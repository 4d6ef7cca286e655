#include "sigmove/nn/model_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "sigmove/error.hpp"
#include "sigmove/market_data.hpp"

namespace sigmove::nn {

namespace {

std::string_view layer_name(LayerType t) {
  switch (t) {
    case LayerType::dense: return "dense";
    case LayerType::conv1d: return "conv1d";
    case LayerType::flatten: return "flatten";
    case LayerType::dropout: return "dropout";
    case LayerType::lstm: return "lstm";
  }
  return "?";
}

LayerType parse_layer(const std::string& s) {
  if (s == "dense") return LayerType::dense;
  if (s == "conv1d") return LayerType::conv1d;
  if (s == "flatten") return LayerType::flatten;
  if (s == "dropout") return LayerType::dropout;
  if (s == "lstm") return LayerType::lstm;
  throw DataError("model file: unknown layer type `" + s + "`");
}

template <typename T>
T read(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) throw DataError(std::string("model file: missing ") + what);
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw DataError(std::string("model file: bad ") + what + " `" + token + "`");
  return value;
}

void expect(std::istream& in, const char* key) {
  std::string token;
  if (!(in >> token) || token != key) throw DataError(std::string("model file: expected `") + key + "`");
}

}  // namespace

void save_network(const NetworkSpec& spec, const Params& params, std::ostream& out) {
  out << "sigmove-net 1\n"
      << "kind " << to_string(spec.kind) << '\n'
      << "window " << spec.input_window << '\n'
      << "seed " << params.seed << '\n'
      << "layers " << spec.layers.size() << '\n';
  for (const auto& l : spec.layers)
    out << "layer " << layer_name(l.type) << ' ' << l.units << ' ' << l.kernel << ' ' << (l.relu ? 1 : 0) << ' '
        << (l.return_sequence ? 1 : 0) << ' ' << format_double(l.rate) << '\n';
  out << "params " << params.count() << '\n';
  for (const auto& b : params.blocks) {
    out << "block " << b.name << ' ' << b.shape.size();
    for (auto d : b.shape) out << ' ' << d;
    out << '\n';
  }
  for (double v : params.values) out << format_double(v) << '\n';
}

SavedNetwork load_network(std::istream& in) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "sigmove-net" || version != "1")
    throw DataError("not a sigmove network file");
  SavedNetwork saved;
  std::string kind;
  expect(in, "kind");
  if (!(in >> kind)) throw DataError("model file: missing kind");
  saved.spec.kind = parse_model_kind(kind);
  expect(in, "window");
  saved.spec.input_window = read<std::size_t>(in, "window");
  expect(in, "seed");
  saved.params.seed = read<std::uint64_t>(in, "seed");
  expect(in, "layers");
  const auto n_layers = read<std::size_t>(in, "layer count");
  for (std::size_t i = 0; i < n_layers; ++i) {
    expect(in, "layer");
    std::string type;
    if (!(in >> type)) throw DataError("model file: truncated layer");
    LayerSpec l;
    l.type = parse_layer(type);
    l.units = read<std::size_t>(in, "units");
    l.kernel = read<std::size_t>(in, "kernel");
    l.relu = read<int>(in, "relu flag") != 0;
    l.return_sequence = read<int>(in, "sequence flag") != 0;
    l.rate = read<double>(in, "dropout rate");
    saved.spec.layers.push_back(l);
  }
  saved.params.blocks = param_layout(saved.spec);
  expect(in, "params");
  const auto count = read<std::size_t>(in, "parameter count");
  if (count != param_count(saved.spec)) throw DataError("model file: parameter count does not match layers");
  for (const auto& b : saved.params.blocks) {
    expect(in, "block");
    std::string name;
    in >> name;
    const auto rank = read<std::size_t>(in, "rank");
    Tensor::Shape shape(rank);
    for (auto& d : shape) d = read<std::size_t>(in, "dimension");
    if (name != b.name || shape != b.shape) throw DataError("model file: block `" + name + "` does not match layers");
  }
  saved.params.values.resize(count);
  for (auto& v : saved.params.values) v = read<double>(in, "parameter value");
  return saved;
}

}  // namespace sigmove::nn
