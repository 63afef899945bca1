#include "gsaudio/core/weights_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gsaudio/error.hpp"

namespace gsaudio::core {
namespace {

constexpr char kMagic[8] = {'G', 'S', 'A', 'W', 'G', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "weight files are written in native little-endian order");

}  // namespace

const Tensor& WeightsFile::get(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw SchemaError(name, "weights file has no tensor named '" + name + "'");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_weights(const std::filesystem::path& path, nlohmann::json header,
                   const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, t] : tensors)
    header["tensors"].push_back({{"name", name}, {"shape", t->shape()}});
  const std::string head = header.dump();
  std::string bytes(kMagic, sizeof(kMagic));
  const std::uint64_t len = head.size();
  bytes.append(reinterpret_cast<const char*>(&len), sizeof(len));
  bytes += head;
  for (const auto& [name, t] : tensors)
    bytes.append(reinterpret_cast<const char*>(t->data().data()), t->size() * sizeof(double));
  write_file_atomic(path, bytes);
}

WeightsFile read_weights(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw SchemaError("magic", "not a gsaudio weights file: " + path.string());
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 8, sizeof(len));
  if (16 + len > bytes.size()) throw SchemaError("header", "truncated header in " + path.string());
  WeightsFile file;
  try {
    file.header = nlohmann::json::parse(bytes.substr(16, len));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("header", "malformed header in " + path.string() + ": " + e.what());
  }
  if (!file.header.contains("tensors")) throw SchemaError("tensors", "header lacks tensor table");
  std::size_t offset = 16 + len;
  for (const auto& entry : file.header["tensors"]) {
    std::vector<std::size_t> shape = entry.at("shape").get<std::vector<std::size_t>>();
    std::size_t count = 1;
    for (std::size_t d : shape) count *= d;
    if (offset + count * sizeof(double) > bytes.size())
      throw SchemaError(entry.at("name").get<std::string>(), "truncated tensor data in " + path.string());
    std::vector<double> data(count);
    std::memcpy(data.data(), bytes.data() + offset, count * sizeof(double));
    offset += count * sizeof(double);
    file.tensors.push_back({entry.at("name").get<std::string>(), Tensor(std::move(shape), std::move(data))});
  }
  file.header.erase("tensors");
  return file;
}

}  // namespace gsaudio::core
