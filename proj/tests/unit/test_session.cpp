#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cosmo/canonical.hpp"
#include "cosmo/errors.hpp"
#include "cosmo/session.hpp"

using namespace cosmo;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("cosmo_test_" + name); }

}  // namespace

TEST_CASE("session save and load") {
  const CosmoModel m;
  const FriedmannSystem sys = reduce_to_friedmann(m);
  const SessionArchive s = make_session(m, sys);
  CHECK(s.expressions.count("Ecunr1"));
  CHECK(s.tensors.count("T1"));
  const fs::path path = temp_file("roundtrip.json");
  save_session(s, path.string());
  const SessionArchive back = load_session(path.string());
  CHECK(back.settings == s.settings);
  REQUIRE(back.expressions.size() == s.expressions.size());
  for (const auto& [name, e] : s.expressions) CHECK_MESSAGE(equivalent(back.expressions.at(name), e), name);
  for (const auto& [name, t] : s.tensors) {
    CHECK(back.tensors.at(name).valence() == t.valence());
    CHECK(back.tensors.at(name).components() == t.components());
  }
  fs::remove(path);
}

TEST_CASE("malformed session files") {
  const CosmoModel m;
  const std::string text = session_to_string(make_session(m, reduce_to_friedmann(m)));
  CHECK_THROWS_AS(session_from_string(text.substr(0, text.size() / 2)), SessionError);
  CHECK_THROWS_AS(session_from_string("{}"), SessionError);
  CHECK_THROWS_AS(session_from_string("not json"), SessionError);
  CHECK_THROWS_AS(session_from_string(R"({"format": "cosmo-session", "version": 1, "settings": {},
    "expressions": {"x": {"tree": {"op": "frobnicate"}}}, "tensors": {}})"),
                  SessionError);

  const fs::path path = temp_file("truncated.json");
  {
    std::ofstream out(path);
    out << text.substr(0, 100);
  }
  CHECK_THROWS_AS(load_session(path.string()), SessionError);
  fs::remove(path);
  CHECK_THROWS_AS(load_session(temp_file("missing.json").string()), SessionError);
  CHECK_THROWS_AS(save_session(SessionArchive{}, "/nonexistent-dir/x.json"), SessionError);
}

TEST_CASE("older archive versions are rejected") {
  const std::string v0 = R"({"format": "cosmo-session", "version": 0, "settings": {}, "expressions": {}, "tensors": {}})";
  CHECK_THROWS_AS(session_from_string(v0), SessionVersionError);
}
