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

#include "ddl/literal.hpp"
#include "ddl/theory.hpp"
#include "ddl/extension.hpp"
#include "ddl/reduct.hpp"
#include "ddl/engine.hpp"
#include "ddl/dsl.hpp"
#include "ddl/proof.hpp"
#include "ddl/generate.hpp"
