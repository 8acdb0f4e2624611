#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hjrd/errors.hpp"
#include "hjrd/grid.hpp"

// Serialization assumes a little-endian host with IEEE-754 doubles, which
// covers every platform this project targets.

namespace hjrd {

namespace {

constexpr char kMagic[4] = {'H', 'J', 'R', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_field(const Field& f, const std::filesystem::path& path,
                 const std::map<std::string, std::string>& labels) {
  const Grid& g = f.grid;
  if (f.values.size() != g.num_nodes())
    throw GridMismatch("field value count does not match its grid");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  for (std::size_t j = 0; j < g.dim(); ++j) {
    put<double>(os, g.min(j));
    put<double>(os, g.max(j));
    put<std::uint64_t>(os, g.count(j));
    put<std::uint8_t>(os, g.periodic(j) ? 1 : 0);
  }
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw Error("write failed: " + path.string());
  os.close();

  nlohmann::json meta;
  meta["format"] = "HJRD";
  meta["version"] = kVersion;
  meta["dim"] = g.dim();
  meta["min"] = g.spec().min;
  meta["max"] = g.spec().max;
  meta["count"] = g.spec().count;
  meta["periodic"] = g.spec().periodic;
  meta["labels"] = labels;
  std::ofstream js(path.string() + ".json", std::ios::trunc);
  if (!js) throw Error("cannot open for writing: " + path.string() + ".json");
  js << meta.dump(2) << "\n";
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for reading: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("not a field file (bad magic): " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion)
    throw Error("unsupported field file version " + std::to_string(version));
  const auto dim = get<std::uint32_t>(is);
  GridSpec spec;
  for (std::uint32_t j = 0; j < dim; ++j) {
    spec.min.push_back(get<double>(is));
    spec.max.push_back(get<double>(is));
    spec.count.push_back(static_cast<std::size_t>(get<std::uint64_t>(is)));
    spec.periodic.push_back(get<std::uint8_t>(is) != 0);
  }
  if (!is) throw Error("truncated field header: " + path.string());
  Field f = make_field(Grid(spec));
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!is || is.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(double)))
    throw Error("truncated field data: " + path.string());
  return f;
}

}  // namespace hjrd
