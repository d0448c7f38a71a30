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

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run ddlpo(const std::string& args) {
  std::string cmd = std::string(DDLPO_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ddlpo_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return quoted(p.string());
  }

  fs::path dir_;
};

std::string S(const char* name) { return quoted(sample_path(name)); }

}  // namespace

TEST(Cli, ExtensionJsonMatchesLibrary) {
  auto r = ddlpo("extension " + S("example6.ddl"));
  EXPECT_EQ(r.code, 0);
  auto lib = ddl::emit_extension(ddl::compute_extension(sample("example6.ddl")).extension, ddl::Format::Json);
  EXPECT_EQ(r.out, lib);
}

TEST(Cli, ExtensionIsDeterministic) {
  auto a = ddlpo("extension --trace " + S("multiple_dependencies.ddl"));
  auto b = ddlpo("extension --trace " + S("multiple_dependencies.ddl"));
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  EXPECT_TRUE(j.contains("extension"));
  EXPECT_FALSE(j["trace"].empty());
}

TEST(Cli, QueryExitCodes) {
  auto yes = ddlpo("query " + S("example6.ddl") + " 'O a & b'");
  EXPECT_EQ(yes.code, 0);
  EXPECT_EQ(yes.out, "proven\n");
  auto no = ddlpo("query " + S("example6.ddl") + " 'O c & d'");
  EXPECT_EQ(no.code, 1);
  EXPECT_EQ(no.out, "refuted\n");
  auto neg = ddlpo("query " + S("example6.ddl") + " -- '-O c & d'");
  EXPECT_EQ(neg.code, 0);
  auto unknown = ddlpo("query " + S("example6.ddl") + " 'd z'");
  EXPECT_EQ(unknown.code, 1);
  EXPECT_EQ(unknown.out, "refuted (no rules)\n");
  EXPECT_EQ(ddlpo("query " + S("example6.ddl") + " 'O a &'").code, 2);
}

TEST(Cli, QueryWitnessIsAccepted) {
  auto r = ddlpo("query --witness " + S("example6.ddl") + " 'O a & b'");
  EXPECT_EQ(r.code, 0);
  auto body = r.out.substr(r.out.find('\n') + 1);
  auto parsed = ddl::parse_derivation(body);
  ASSERT_TRUE(parsed.derivation);
  EXPECT_TRUE(ddl::check_derivation(sample("example6.ddl"), *parsed.derivation).accepted);
}

TEST_F(Scratch, CheckExitCodes) {
  auto good = write("good.txt", "+dO a\n+dO b\n+d ~a\n+dO a & b\n");
  auto bad = write("bad.txt", "+dO a\n+d ~a\n+dO b\n+dO a & b\n");
  auto junk = write("junk.txt", "+dO a\nnonsense\n");
  auto t = S("pragmatic_unpragmatic.ddl");
  auto ok = ddlpo("check " + t + " " + good);
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(ok.out)["accepted"].get<bool>());
  auto rej = ddlpo("check --format text " + t + " " + bad);
  EXPECT_EQ(rej.code, 1);
  EXPECT_NE(rej.out.find("rejected"), std::string::npos);
  EXPECT_EQ(ddlpo("check " + t + " " + junk).code, 2);
}

TEST_F(Scratch, MalformedStrictAndEmptyInputs) {
  EXPECT_EQ(ddlpo("extension " + write("bad.ddl", "fact O[a].\n")).code, 2);
  EXPECT_EQ(ddlpo("extension " + quoted((dir_ / "missing.ddl").string())).code, 2);
  auto cyclic = write("cyclic.ddl", "r1: =O> a.\nr2: =O> ~a.\nr1 > r2.\nr2 > r1.\n");
  EXPECT_EQ(ddlpo("extension " + cyclic).code, 0);
  EXPECT_EQ(ddlpo("extension --strict " + cyclic).code, 3);
  auto empty = ddlpo("extension " + write("empty.ddl", ""));
  EXPECT_EQ(empty.code, 0);
  auto j = nlohmann::json::parse(empty.out);
  for (auto it = j.begin(); it != j.end(); ++it) EXPECT_TRUE(it->empty()) << it.key();
}

TEST(Cli, ReductPrintsParsableTheory) {
  auto r = ddlpo("reduct " + S("multiple_dependencies.ddl") + " ~a ~b");
  EXPECT_EQ(r.code, 0);
  auto t = parse_or_throw(r.out);
  auto expect = ddl::reduct(sample("multiple_dependencies.ddl"), {L("~a"), L("~b")});
  EXPECT_EQ(t, expect);
}

TEST(Cli, GenIsSeeded) {
  auto a = ddlpo("gen layered --n 20 --r 40 --seed 3");
  auto b = ddlpo("gen layered --n 20 --r 40 --seed 3");
  auto c = ddlpo("gen layered --n 20 --r 40 --seed 4");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(parse_or_throw(a.out).rules().size(), 40u);
}

TEST(Cli, BenchPrintsCsv) {
  auto r = ddlpo("bench --family chain-ctd --sizes 10,20 --reps 5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("family,n,r,m,k,median_ms\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(ddlpo("").code, 2);
  EXPECT_EQ(ddlpo("frobnicate").code, 2);
  EXPECT_EQ(ddlpo("gen nosuchfamily").code, 2);
}
