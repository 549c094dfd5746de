/* Copyright 2026 The Camoval Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "camoval/cemb.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "camoval/error.hpp"

namespace camoval {

namespace fs = std::filesystem;

namespace {

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T GetLe(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
  }
  return value;
}

std::vector<std::uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void ParseIndexRecord(const nlohmann::json& obj, const std::string& where,
                      CembIndex& index) {
  if (obj.contains("meta")) {
    for (const auto& [k, v] : obj["meta"].items()) {
      index.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  } else if (obj.contains("gap")) {
    index.gaps.push_back({obj["gap"].get<std::string>(),
                          obj.value("reason", std::string())});
  } else if (obj.contains("ordinal") && obj.contains("id")) {
    const auto ordinal = obj["ordinal"].get<std::size_t>();
    if (ordinal != index.ids.size()) {
      throw Error(ErrorCode::kParseError,
                  where + ": ordinal " + std::to_string(ordinal) + " out of sequence");
    }
    index.ids.push_back(obj["id"].get<std::string>());
  } else {
    throw Error(ErrorCode::kParseError, where + ": unrecognized record");
  }
}

}  // namespace

Eigen::Map<const RowMatrixXf> CembFile::record(std::size_t i) const {
  return {values.data() + i * record_size(), static_cast<Eigen::Index>(cells()),
          static_cast<Eigen::Index>(dim)};
}

Eigen::Map<const RowMatrixXf> CembFile::rows() const {
  return {values.data(), static_cast<Eigen::Index>(count * cells()),
          static_cast<Eigen::Index>(dim)};
}

std::vector<std::uint8_t> EncodeCemb(const CembFile& file) {
  if (file.values.size() != static_cast<std::size_t>(file.count) * file.record_size()) {
    throw Error(ErrorCode::kFormatError, "CEMB payload size does not match header");
  }
  std::vector<std::uint8_t> out = {'C', 'E', 'M', 'B'};
  out.reserve(kCembHeaderBytes + file.values.size() * 4);
  PutLe<std::uint16_t>(out, kCembVersion);
  PutLe<std::uint32_t>(out, file.count);
  PutLe<std::uint16_t>(out, file.grid_h);
  PutLe<std::uint16_t>(out, file.grid_w);
  PutLe<std::uint32_t>(out, file.dim);
  for (float v : file.values) PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

CembFile DecodeCemb(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCembHeaderBytes ||
      std::memcmp(bytes.data(), "CEMB", 4) != 0) {
    throw Error(ErrorCode::kFormatError, "not a CEMB file (bad magic)");
  }
  const auto version = GetLe<std::uint16_t>(bytes, 4);
  if (version != kCembVersion) {
    throw Error(ErrorCode::kFormatError,
                "unsupported CEMB version " + std::to_string(version));
  }
  CembFile file;
  file.count = GetLe<std::uint32_t>(bytes, 6);
  file.grid_h = GetLe<std::uint16_t>(bytes, 10);
  file.grid_w = GetLe<std::uint16_t>(bytes, 12);
  file.dim = GetLe<std::uint32_t>(bytes, 14);
  if (file.grid_h == 0 || file.grid_w == 0 || file.dim == 0) {
    throw Error(ErrorCode::kFormatError, "CEMB grid and dim must be >= 1");
  }
  // Bound each factor by the floats actually present before multiplying, so
  // a hostile header cannot wrap the product.
  const std::size_t available = (bytes.size() - kCembHeaderBytes) / 4;
  if (file.count > 0 && (file.dim > available / file.cells() ||
                          file.count > available / file.record_size())) {
    throw Error(ErrorCode::kFormatError, "CEMB header implies more data than present");
  }
  const std::size_t n = static_cast<std::size_t>(file.count) * file.record_size();
  if (bytes.size() != kCembHeaderBytes + n * 4) {
    throw Error(ErrorCode::kFormatError,
                "CEMB payload is " + std::to_string(bytes.size() - kCembHeaderBytes) +
                    " bytes, header implies " + std::to_string(n * 4));
  }
  file.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    file.values[i] = std::bit_cast<float>(
        GetLe<std::uint32_t>(bytes, kCembHeaderBytes + 4 * i));
  }
  return file;
}

CembFile ReadCemb(const fs::path& path) { return DecodeCemb(ReadBytes(path)); }

void WriteCemb(const fs::path& path, const CembFile& file) {
  const auto bytes = EncodeCemb(file);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

fs::path IndexPathFor(const fs::path& cemb_path) {
  return fs::path(cemb_path.string() + ".index");
}

CembIndex ParseCembIndex(std::string_view text) {
  CembIndex index;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError,
                  "index line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string where = "index line " + std::to_string(line_no);
    try {
      ParseIndexRecord(obj, where, index);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
  }
  return index;
}

std::string FormatCembIndex(const CembIndex& index) {
  std::string out;
  if (!index.meta.empty()) {
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : index.meta) meta[k] = v;
    out += nlohmann::json{{"meta", meta}}.dump() + "\n";
  }
  for (std::size_t i = 0; i < index.ids.size(); ++i) {
    out += nlohmann::json{{"ordinal", i}, {"id", index.ids[i]}}.dump() + "\n";
  }
  for (const auto& gap : index.gaps) {
    out += nlohmann::json{{"gap", gap.id}, {"reason", gap.reason}}.dump() + "\n";
  }
  return out;
}

CembIndex ReadCembIndex(const fs::path& path) {
  const auto bytes = ReadBytes(path);
  return ParseCembIndex(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

void WriteCembIndex(const fs::path& path, const CembIndex& index) {
  std::ofstream out(path, std::ios::binary);
  out << FormatCembIndex(index);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::optional<std::size_t> IndexedCemb::find(const std::string& id) const {
  if (!index) return std::nullopt;
  for (std::size_t i = 0; i < index->ids.size(); ++i) {
    if (index->ids[i] == id) return i;
  }
  return std::nullopt;
}

IndexedCemb LoadIndexedCemb(const fs::path& path, bool require_index) {
  IndexedCemb out;
  const auto bytes = ReadBytes(path);
  out.file = DecodeCemb(bytes);
  out.sha256 = Sha256Hex(bytes);
  const fs::path index_path = IndexPathFor(path);
  std::error_code ec;
  if (fs::is_regular_file(index_path, ec)) {
    out.index = ReadCembIndex(index_path);
    if (out.index->ids.size() != out.file.count) {
      throw Error(ErrorCode::kFormatError,
                  index_path.string() + " lists " +
                      std::to_string(out.index->ids.size()) + " ids for " +
                      std::to_string(out.file.count) + " records");
    }
    std::set<std::string> unique(out.index->ids.begin(), out.index->ids.end());
    if (unique.size() != out.index->ids.size()) {
      throw Error(ErrorCode::kFormatError, index_path.string() + " has duplicate ids");
    }
  } else if (require_index) {
    throw Error(ErrorCode::kIoError, "missing sidecar index " + index_path.string());
  }
  return out;
}

std::string Sha256Hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

}  // namespace camoval
