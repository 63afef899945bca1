#include "gsaudio/scene/ply.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"

namespace gsaudio::scene {
namespace {

static_assert(std::endian::native == std::endian::little, "PLY I/O assumes a little-endian host");

struct TypeInfo {
  const char* name;
  const char* alias;
  PlyScalar type;
  std::size_t width;
};

constexpr TypeInfo kTypes[] = {
    {"char", "int8", PlyScalar::int8, 1},       {"uchar", "uint8", PlyScalar::uint8, 1},
    {"short", "int16", PlyScalar::int16, 2},    {"ushort", "uint16", PlyScalar::uint16, 2},
    {"int", "int32", PlyScalar::int32, 4},      {"uint", "uint32", PlyScalar::uint32, 4},
    {"float", "float32", PlyScalar::float32, 4}, {"double", "float64", PlyScalar::float64, 8},
};

const TypeInfo& info(PlyScalar t) {
  for (const auto& i : kTypes)
    if (i.type == t) return i;
  throw ContractViolation("unknown PLY scalar type");
}

const TypeInfo* lookup(const std::string& name) {
  for (const auto& i : kTypes)
    if (name == i.name || name == i.alias) return &i;
  return nullptr;
}

template <typename T>
double load_as(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return static_cast<double>(v);
}

double decode(PlyScalar t, const char* p) {
  switch (t) {
    case PlyScalar::int8: return load_as<std::int8_t>(p);
    case PlyScalar::uint8: return load_as<std::uint8_t>(p);
    case PlyScalar::int16: return load_as<std::int16_t>(p);
    case PlyScalar::uint16: return load_as<std::uint16_t>(p);
    case PlyScalar::int32: return load_as<std::int32_t>(p);
    case PlyScalar::uint32: return load_as<std::uint32_t>(p);
    case PlyScalar::float32: return load_as<float>(p);
    case PlyScalar::float64: return load_as<double>(p);
  }
  return 0.0;
}

template <typename T>
void store_as(std::string& out, double v) {
  const T t = static_cast<T>(v);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &t, sizeof(T));
  out.append(bytes, sizeof(T));
}

void encode(PlyScalar t, double v, std::string& out) {
  switch (t) {
    case PlyScalar::int8: return store_as<std::int8_t>(out, v);
    case PlyScalar::uint8: return store_as<std::uint8_t>(out, v);
    case PlyScalar::int16: return store_as<std::int16_t>(out, v);
    case PlyScalar::uint16: return store_as<std::uint16_t>(out, v);
    case PlyScalar::int32: return store_as<std::int32_t>(out, v);
    case PlyScalar::uint32: return store_as<std::uint32_t>(out, v);
    case PlyScalar::float32: return store_as<float>(out, v);
    case PlyScalar::float64: return store_as<double>(out, v);
  }
}

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

}  // namespace

long PlyTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < properties.size(); ++i)
    if (properties[i].name == name) return static_cast<long>(i);
  return -1;
}

const std::vector<double>& PlyTable::column(const std::string& name) const {
  const long i = find(name);
  if (i < 0) throw SchemaError(name, "point cloud lacks property '" + name + "'");
  return columns[static_cast<std::size_t>(i)];
}

PlyTable read_ply(const std::filesystem::path& path) {
  const std::string bytes = core::read_file(path);
  const auto fail = [&](const std::string& why) { return DataError(path.string() + ": " + why); };

  const std::size_t header_end = bytes.find("end_header");
  if (bytes.compare(0, 3, "ply") != 0 || header_end == std::string::npos) throw fail("not a PLY file");
  std::size_t body = bytes.find('\n', header_end);
  if (body == std::string::npos) throw fail("truncated header");
  ++body;

  std::istringstream header(bytes.substr(0, header_end));
  std::string line, format;
  std::vector<Element> elements;
  while (std::getline(header, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::string keyword;
    words >> keyword;
    if (keyword == "format") {
      words >> format;
    } else if (keyword == "element") {
      Element e;
      words >> e.name >> e.count;
      if (!words) throw fail("malformed element line: " + line);
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) throw fail("property before any element");
      std::string type, name;
      words >> type;
      if (type == "list") throw fail("list properties are not supported");
      words >> name;
      const TypeInfo* t = lookup(type);
      if (!t || name.empty()) throw fail("malformed property line: " + line);
      elements.back().properties.push_back({name, t->type});
    }
  }
  if (format != "binary_little_endian" && format != "ascii") throw fail("unsupported format '" + format + "'");

  PlyTable table;
  bool found = false;
  if (format == "ascii") {
    std::istringstream in(bytes.substr(body));
    for (const auto& e : elements) {
      const bool vertex = e.name == "vertex";
      if (vertex) {
        table.count = e.count;
        table.properties = e.properties;
        table.columns.assign(e.properties.size(), std::vector<double>(e.count));
        found = true;
      }
      for (std::size_t i = 0; i < e.count; ++i)
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          double v;
          if (!(in >> v)) throw fail("truncated ASCII body");
          if (vertex) table.columns[p][i] = v;
        }
      if (vertex) break;
    }
  } else {
    std::size_t pos = body;
    for (const auto& e : elements) {
      std::size_t stride = 0;
      for (const auto& p : e.properties) stride += info(p.type).width;
      if (pos + stride * e.count > bytes.size()) throw fail("truncated element '" + e.name + "'");
      if (e.name == "vertex") {
        table.count = e.count;
        table.properties = e.properties;
        table.columns.assign(e.properties.size(), std::vector<double>(e.count));
        for (std::size_t i = 0; i < e.count; ++i) {
          const char* row = bytes.data() + pos + i * stride;
          for (std::size_t p = 0; p < e.properties.size(); ++p) {
            table.columns[p][i] = decode(e.properties[p].type, row);
            row += info(e.properties[p].type).width;
          }
        }
        found = true;
        break;
      }
      pos += stride * e.count;
    }
  }
  if (!found) throw SchemaError("vertex", path.string() + ": no vertex element");
  return table;
}

void write_ply(const std::filesystem::path& path, const PlyTable& table) {
  if (table.columns.size() != table.properties.size()) throw ContractViolation("PLY column/property count mismatch");
  for (const auto& c : table.columns)
    if (c.size() != table.count) throw ContractViolation("PLY column length differs from vertex count");

  std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " + std::to_string(table.count) + "\n";
  for (const auto& p : table.properties) out += "property " + std::string(info(p.type).name) + " " + p.name + "\n";
  out += "end_header\n";
  for (std::size_t i = 0; i < table.count; ++i)
    for (std::size_t p = 0; p < table.properties.size(); ++p) encode(table.properties[p].type, table.columns[p][i], out);
  core::write_file_atomic(path, out);
}

}  // namespace gsaudio::scene
