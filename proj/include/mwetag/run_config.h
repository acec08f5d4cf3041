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

// Flat "key = value" run configuration for the command-line tool.
//
//   # comment
//   model_kind = bilstm_crf
//   train_file = data/dimsum16.train
//
// Values are unquoted and run to the end of the line. Unknown or repeated
// keys are errors. Relative paths resolve against the config file's
// directory.

#ifndef MWETAG_RUN_CONFIG_H_
#define MWETAG_RUN_CONFIG_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "mwetag/error.h"
#include "mwetag/taggers.h"

namespace mwetag {

struct RunConfig {
  TrainConfig train;
  std::string train_file;
  std::string test_file;
  std::string embeddings_file;       // embeddings for train_file
  std::string test_embeddings_file;  // embeddings for test_file
  std::string model_file;
  std::string report_file;
  std::string loss_trace_file;  // defaults to model_file + ".loss.txt"
  std::vector<std::string> exclude_ids;
  bool strict_iob = false;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// `base_dir` is prepended to relative paths; pass "" to keep them as-is.
RunConfig ParseRunConfig(std::istream& in, const std::string& base_dir = "");
RunConfig LoadRunConfig(const std::string& path);

std::vector<std::string> SplitList(const std::string& text);

}  // namespace mwetag

#endif  // MWETAG_RUN_CONFIG_H_
