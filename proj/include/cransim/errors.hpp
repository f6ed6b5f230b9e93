// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cransim {

// invalid scenario / experiment configuration
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// malformed input file (config, dataset, model)
class parse_error : public std::runtime_error {
  public:
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cransim
