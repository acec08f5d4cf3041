// Copyright 2026 The mwetag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mwetag/run_config.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

namespace mwetag {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': '" + value +
                      "' is not a valid number");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false");
}

}  // namespace

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    auto item = Trim(text.substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = comma + 1;
  }
  return out;
}

RunConfig ParseRunConfig(std::istream& in, const std::string& base_dir) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    auto key = Trim(line.substr(0, eq));
    auto value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
  }

  RunConfig cfg;
  // The model kind picks the defaults every other training key overrides.
  if (const auto it = entries.find("model_kind"); it != entries.end()) {
    try {
      cfg.train = ParseModelKind(it->second.first) == ModelKind::kLinearHead
                      ? TrainConfig::LinearHeadDefaults()
                      : TrainConfig::BilstmCrfDefaults();
    } catch (const Error& e) {
      throw ConfigError("config line " + std::to_string(it->second.second) +
                        ": " + e.what());
    }
  }

  auto path = [&](const std::string& value) {
    std::filesystem::path p(value);
    if (base_dir.empty() || p.is_absolute()) return value;
    return (std::filesystem::path(base_dir) / p).string();
  };

  TrainConfig& t = cfg.train;
  const std::map<std::string,
                 std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"model_kind", [&](auto&, auto&) {}},
          {"learning_rate",
           [&](auto& k, auto& v) {
             t.learning_rate = ParseNumber<double>(k, v);
           }},
          {"epochs",
           [&](auto& k, auto& v) { t.epochs = ParseNumber<int>(k, v); }},
          {"batch_size",
           [&](auto& k, auto& v) { t.batch_size = ParseNumber<int>(k, v); }},
          {"warmup_fraction",
           [&](auto& k, auto& v) {
             t.warmup_fraction = ParseNumber<double>(k, v);
           }},
          {"seed", [&](auto& k,
                       auto& v) { t.seed = ParseNumber<std::uint64_t>(k, v); }},
          {"hidden_size",
           [&](auto& k, auto& v) { t.hidden_size = ParseNumber<int>(k, v); }},
          {"embed_dim",
           [&](auto& k, auto& v) { t.embed_dim = ParseNumber<int>(k, v); }},
          {"scheme", [&](auto&, auto& v) { t.scheme = ParseSchemeMode(v); }},
          {"clip_norm",
           [&](auto& k, auto& v) { t.clip_norm = ParseNumber<double>(k, v); }},
          {"lr_schedule",
           [&](auto&, auto& v) { t.lr_schedule = ParseLrSchedule(v); }},
          {"init_scale",
           [&](auto& k, auto& v) { t.init_scale = ParseNumber<double>(k, v); }},
          {"train_file", [&](auto&, auto& v) { cfg.train_file = path(v); }},
          {"test_file", [&](auto&, auto& v) { cfg.test_file = path(v); }},
          {"embeddings_file",
           [&](auto&, auto& v) { cfg.embeddings_file = path(v); }},
          {"test_embeddings_file",
           [&](auto&, auto& v) { cfg.test_embeddings_file = path(v); }},
          {"model_file", [&](auto&, auto& v) { cfg.model_file = path(v); }},
          {"report_file", [&](auto&, auto& v) { cfg.report_file = path(v); }},
          {"loss_trace_file",
           [&](auto&, auto& v) { cfg.loss_trace_file = path(v); }},
          {"exclude_ids",
           [&](auto&, auto& v) { cfg.exclude_ids = SplitList(v); }},
          {"strict_iob",
           [&](auto& k, auto& v) { cfg.strict_iob = ParseBool(k, v); }},
  };

  for (const auto& [key, entry] : entries) {
    const auto& [value, line_no] = entry;
    const auto setter = setters.find(key);
    if (setter == setters.end()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    try {
      setter->second(key, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  if (cfg.loss_trace_file.empty() && !cfg.model_file.empty()) {
    cfg.loss_trace_file = cfg.model_file + ".loss.txt";
  }
  try {
    t.Validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return ParseRunConfig(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace mwetag
