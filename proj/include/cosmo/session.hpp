#pragma once

#include <map>
#include <string>

#include "cosmo/expr.hpp"
#include "cosmo/model.hpp"
#include "cosmo/tensor.hpp"

namespace cosmo {

constexpr int kSessionVersion = 1;

/// Named expressions and tensors of a derivation, persisted as JSON text
/// (schema in docs/session-format.md).
struct SessionArchive {
  std::map<std::string, std::string> settings;
  std::map<std::string, Expr> expressions;
  std::map<std::string, Tensor> tensors;
};

/// Settings, the Einstein components, the stress tensors and the reduced system.
SessionArchive make_session(const CosmoModel& m, const FriedmannSystem& sys);

std::string session_to_string(const SessionArchive& s);
/// Throws SessionError for malformed text, SessionVersionError for another version.
SessionArchive session_from_string(const std::string& text);

void save_session(const SessionArchive& s, const std::string& path);
SessionArchive load_session(const std::string& path);

}  // namespace cosmo
