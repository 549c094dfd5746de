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

#include "camoval/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace camoval {

namespace {

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string CsvField(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string FormatNumber(std::optional<double> value) {
  if (!value || !std::isfinite(*value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *value);
  return buf;
}

std::string FormatCsv(const Table& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += CsvField(fields[i]);
    }
    out += '\n';
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  return out;
}

nlohmann::json JsonNumber(std::optional<double> value) {
  if (!value || !std::isfinite(*value)) return nullptr;
  return *value;
}

nlohmann::json ErrorJson(const Error& error) {
  return {{"code", std::string(ErrorCodeName(error.code()))},
          {"message", error.what()}};
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::vector<std::filesystem::path> WriteReport(const std::filesystem::path& out,
                                               const Report& report, int workers) {
  nlohmann::json doc;
  doc["header"] = {{"toolkit_version", kToolkitVersion},
                   {"command", report.command},
                   {"generated_at", UtcTimestamp()},
                   {"workers", workers}};
  doc["body"] = report.body;
  std::vector<std::filesystem::path> written{out};
  WriteTextFile(out, doc.dump(2) + "\n");
  for (const auto& [suffix, table] : report.tables) {
    auto csv = out;
    csv.replace_extension("." + suffix + ".csv");
    WriteTextFile(csv, FormatCsv(table));
    written.push_back(csv);
  }
  return written;
}

}  // namespace camoval
