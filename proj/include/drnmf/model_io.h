// include/drnmf/model_io.h

// Copyright 2026  The drnmf authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DRNMF_MODEL_IO_H_
#define DRNMF_MODEL_IO_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace drnmf {

// Self-describing binary container: magic "DRNMF1\n", then named f64
// little-endian arrays (column-major), then a key=value metadata text block.
// Round trips are bit exact.
struct ArrayStore {
  std::vector<std::pair<std::string, Eigen::MatrixXd>> arrays;
  std::map<std::string, std::string> metadata;

  bool has_array(const std::string& name) const;
  const Eigen::MatrixXd& array(const std::string& name) const;

  void set_meta(const std::string& key, const std::string& value);
  void set_meta_int(const std::string& key, long long value);
  void set_meta_double(const std::string& key, double value);  // exact round trip
  const std::string& meta(const std::string& key) const;
  long long meta_int(const std::string& key) const;
  double meta_double(const std::string& key) const;
};

void save_array_store(const std::string& path, const ArrayStore& store);
ArrayStore load_array_store(const std::string& path);

}  // namespace drnmf

#endif  // DRNMF_MODEL_IO_H_
