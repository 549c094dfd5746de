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

// Report emission. Every command produces a JSON document
//
//   {"header": {"toolkit_version", "command", "generated_at", "workers"},
//    "body": {...}}
//
// plus CSV mirrors of its tables. Only the header may differ between two runs
// over identical inputs and configuration.

#ifndef CAMOVAL_REPORT_HPP_
#define CAMOVAL_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camoval/error.hpp"

namespace camoval {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string command;
  nlohmann::json body;
  std::map<std::string, Table> tables;  // suffix -> table, e.g. "rows"
  std::size_t failed = 0;               // drives the exit code
};

// "%.17g"; empty for an absent or non-finite value.
std::string FormatNumber(std::optional<double> value);
// RFC 4180 quoting where needed, "\n" line ends.
std::string FormatCsv(const Table& table);

// JSON of a finite double, null otherwise.
nlohmann::json JsonNumber(std::optional<double> value);

nlohmann::json ErrorJson(const Error& error);

// `out` receives the JSON document; each table goes to `<stem>.<suffix>.csv`
// next to it. Returns the paths written, JSON first.
std::vector<std::filesystem::path> WriteReport(const std::filesystem::path& out,
                                               const Report& report, int workers);

// Writes text atomically enough for our purposes; throws kIoError.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace camoval

#endif  // CAMOVAL_REPORT_HPP_
