#include "reiflab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "reiflab/errors.hpp"

namespace reiflab {
namespace {

static_assert(std::endian::native == std::endian::little, "raster I/O assumes a little-endian host");

constexpr std::uint32_t kRasterVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidInput("truncated raster " + path.string());
  return v;
}

void write_raster(const GridDomain& dom, std::ostream& out) {
  put(out, static_cast<std::uint32_t>(dom.dim()));
  put(out, kRasterVersion);
  put(out, dom.spacing());
  for (int d = 0; d < dom.dim(); ++d) {
    put(out, static_cast<std::int64_t>(dom.lo()[d]));
    put(out, static_cast<std::int64_t>(dom.shape()[d]));
  }
  std::vector<std::uint8_t> bits((dom.node_count() + 7) / 8, 0);
  for (std::size_t i = 0; i < dom.node_count(); ++i)
    if (dom.inside(i)) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
}

DomainPtr read_raster(std::istream& in, const std::filesystem::path& path, const nlohmann::json& meta) {
  const auto N = get<std::uint32_t>(in, path);
  const auto version = get<std::uint32_t>(in, path);
  if (version != kRasterVersion) throw InvalidInput("unsupported raster version in " + path.string());
  if (N < 1 || N > static_cast<std::uint32_t>(kMaxDim)) throw InvalidInput("bad dimension in " + path.string());
  const auto h = get<double>(in, path);
  Node lo{}, shape{1, 1, 1};
  std::size_t count = 1;
  for (std::uint32_t d = 0; d < N; ++d) {
    lo[d] = get<std::int64_t>(in, path);
    shape[d] = get<std::int64_t>(in, path);
    if (shape[d] < 1) throw InvalidInput("bad extent in " + path.string());
    count *= static_cast<std::size_t>(shape[d]);
  }
  std::vector<std::uint8_t> bits((count + 7) / 8);
  if (!in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size())))
    throw InvalidInput("truncated mask in " + path.string());
  std::vector<std::uint8_t> mask(count);
  for (std::size_t i = 0; i < count; ++i) mask[i] = (bits[i / 8] >> (i % 8)) & 1u;
  const std::string label = meta.value("label", std::string("raster"));
  const nlohmann::json params = meta.value("params", nlohmann::json::object());
  return std::make_shared<const GridDomain>(static_cast<int>(N), h, lo, shape, std::move(mask), label, params);
}

nlohmann::json sidecar(const GridDomain& dom) {
  nlohmann::json lo = nlohmann::json::array(), shape = nlohmann::json::array();
  for (int d = 0; d < dom.dim(); ++d) {
    lo.push_back(dom.lo()[d]);
    shape.push_back(dom.shape()[d]);
  }
  return {{"label", dom.label()}, {"params", dom.params()}, {"N", dom.dim()}, {"h", dom.spacing()},
          {"lo", lo},           {"shape", shape}};
}

void write_sidecar(const GridDomain& dom, const std::filesystem::path& path) {
  std::ofstream out(path.string() + ".json");
  if (!out) throw InvalidInput("cannot write " + path.string() + ".json");
  out << sidecar(dom).dump(2) << '\n';
}

nlohmann::json read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path.string() + ".json");
  if (!in) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("bad sidecar " + path.string() + ".json: " + e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  return in;
}

}  // namespace

void write_domain(const GridDomain& dom, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_raster(dom, out);
  write_sidecar(dom, path);
}

DomainPtr read_domain(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_raster(in, path, read_sidecar(path));
}

void write_grid_function(const LatticeField& u, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_raster(u.domain(), out);
  out.write(reinterpret_cast<const char*>(u.values().data()), static_cast<std::streamsize>(u.size() * sizeof(double)));
  write_sidecar(u.domain(), path);
}

LatticeField read_grid_function(const std::filesystem::path& path) {
  auto in = open_in(path);
  auto dom = read_raster(in, path, read_sidecar(path));
  std::vector<double> values(dom->node_count());
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double))))
    throw InvalidInput("truncated values in " + path.string());
  return LatticeField(std::move(dom), std::move(values));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header, bool append)
    : columns_(header.size()) {
  const bool fresh = !append || !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  file_ = std::fopen(path.string().c_str(), append ? "ab" : "wb");
  if (!file_) throw InvalidInput("cannot write " + path.string());
  if (fresh) {
    for (std::size_t i = 0; i < header.size(); ++i) std::fprintf(file_, "%s%s", i ? "," : "", header[i].c_str());
    std::fputc('\n', file_);
  }
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw InvalidInput("csv row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', file_);
    if (const auto* d = std::get_if<double>(&cells[i]))
      std::fputs(format_double(*d).c_str(), file_);
    else if (const auto* n = std::get_if<long long>(&cells[i]))
      std::fprintf(file_, "%lld", *n);
    else
      std::fputs(std::get<std::string>(cells[i]).c_str(), file_);
  }
  std::fputc('\n', file_);
}

}  // namespace reiflab
