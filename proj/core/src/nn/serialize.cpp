#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "tagl/error.hpp"
#include "tagl/nn/network.hpp"

namespace tagl::nn {

namespace {

constexpr char kMagic[8] = {'T', 'A', 'G', 'L', 'N', 'N', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw StructuralError("network file truncated");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t(b[k]) << (8 * k);
  return v;
}

void write_doubles(std::ostream& out, const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, p + i, 8);
    write_u64(out, bits);
  }
}

void read_doubles(std::istream& in, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bits = read_u64(in);
    std::memcpy(p + i, &bits, 8);
  }
}

}  // namespace

void save_network(const Network& net, std::ostream& out) {
  net.validate();
  nlohmann::json header;
  header["format"] = "tagl-network";
  header["version"] = 1;
  for (const auto& l : net.layers) {
    header["layers"].push_back({{"in", l.in()},
                                {"out", l.out()},
                                {"activation", l.activation == Activation::Relu ? "relu" : "identity"},
                                {"masked", l.mask.has_value()}});
  }
  header["heads"] = nlohmann::json::array();
  for (const auto& h : net.heads) {
    header["heads"].push_back({{"attribute", h.attribute},
                               {"offset", h.offset},
                               {"width", h.width},
                               {"kind", h.kind == SpanKind::OneHot ? "softmax" : "linear"}});
  }
  const std::string text = header.dump();
  out.write(kMagic, 8);
  write_u64(out, text.size());
  out.write(text.data(), std::streamsize(text.size()));
  for (const auto& l : net.layers) {
    write_doubles(out, l.weight.data(), std::size_t(l.weight.size()));
    write_doubles(out, l.bias.data(), std::size_t(l.bias.size()));
    if (l.mask) {
      std::vector<unsigned char> bits((std::size_t(l.mask->size()) + 7) / 8, 0);
      for (Eigen::Index i = 0; i < l.mask->size(); ++i)
        if (l.mask->data()[i] != 0.0) bits[std::size_t(i) / 8] |= std::uint8_t(1u << (i % 8));
      out.write(reinterpret_cast<const char*>(bits.data()), std::streamsize(bits.size()));
    }
  }
  if (!out) throw Error("failed writing network");
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  save_network(net, out);
}

Network load_network(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw StructuralError("not a tagl network file");
  }
  const std::uint64_t len = read_u64(in);
  if (len > (1u << 26)) throw StructuralError("network header too large");
  std::string text(len, '\0');
  if (!in.read(text.data(), std::streamsize(len))) throw StructuralError("network file truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("bad network header: ") + e.what());
  }
  Network net;
  try {
    for (const auto& h : header.at("heads")) {
      ColumnSpan s;
      s.attribute = h.at("attribute").get<std::size_t>();
      s.offset = h.at("offset").get<std::size_t>();
      s.width = h.at("width").get<std::size_t>();
      s.kind = h.at("kind").get<std::string>() == "softmax" ? SpanKind::OneHot : SpanKind::Continuous;
      net.heads.push_back(s);
    }
    for (const auto& j : header.at("layers")) {
      DenseLayer l(j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>(),
                   j.at("activation").get<std::string>() == "relu" ? Activation::Relu
                                                                   : Activation::Identity);
      read_doubles(in, l.weight.data(), std::size_t(l.weight.size()));
      read_doubles(in, l.bias.data(), std::size_t(l.bias.size()));
      if (j.at("masked").get<bool>()) {
        Matrix m(l.weight.rows(), l.weight.cols());
        std::vector<unsigned char> bits((std::size_t(m.size()) + 7) / 8);
        if (!in.read(reinterpret_cast<char*>(bits.data()), std::streamsize(bits.size()))) {
          throw StructuralError("network file truncated");
        }
        for (Eigen::Index i = 0; i < m.size(); ++i)
          m.data()[i] = (bits[std::size_t(i) / 8] >> (i % 8)) & 1u ? 1.0 : 0.0;
        l.mask = std::move(m);
      }
      net.layers.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("bad network header: ") + e.what());
  }
  net.validate();
  return net;
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return load_network(in);
}

}  // namespace tagl::nn
