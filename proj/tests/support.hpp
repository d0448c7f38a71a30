/* Copyright 2026 The ddlpo Authors. All Rights Reserved.

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

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ddl/ddl.hpp"

namespace testing_support {

inline std::string sample_path(const std::string& name) { return std::string(DDL_SAMPLES) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ddl::Theory parse_or_throw(const std::string& text) {
  auto res = ddl::parse_theory(text);
  if (!res.ok()) {
    std::string msg;
    for (const auto& d : res.diagnostics) msg += d.str() + "\n";
    throw std::runtime_error(msg);
  }
  return *res.theory;
}

inline ddl::Theory sample(const std::string& name) { return parse_or_throw(read_text(sample_path(name))); }

inline ddl::Literal L(const char* s) { return ddl::Literal::from(s); }
inline ddl::Conjunction C(const char* s) { return ddl::Conjunction::from(s); }
inline ddl::TaggedExpression E(const char* s) { return ddl::TaggedExpression::parse(s); }

}  // namespace testing_support
