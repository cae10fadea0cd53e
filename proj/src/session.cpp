#include "cosmo/session.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cosmo/errors.hpp"
#include "cosmo/parser.hpp"
#include "cosmo/serialize.hpp"

namespace cosmo {

using nlohmann::json;

SessionArchive make_session(const CosmoModel& m, const FriedmannSystem& sys) {
  SessionArchive s;
  s.settings["units"] = m.settings.units == Units::Geometric ? "geometric" : "symbolic";
  s.settings["lambda"] = m.settings.lambda ? "on" : "off";
  s.settings["fluid"] = m.settings.fluid ? "on" : "off";
  for (const auto& e : sys.equations) s.expressions[e.name] = e.residual;
  auto [p, rho] = scalar_pressure_density(m);
  s.expressions["pphi"] = p;
  s.expressions["epsilonphi"] = rho;
  s.tensors["Ein"] = einstein_equations(m);
  s.tensors["T1"] = stress_energy_scalar_direct(m);
  s.tensors["TT1"] = stress_energy_scalar_fluid(m);
  s.tensors["T2"] = stress_energy_fluid(m);
  return s;
}

std::string session_to_string(const SessionArchive& s) {
  json j;
  j["format"] = "cosmo-session";
  j["version"] = kSessionVersion;
  j["settings"] = s.settings;
  j["expressions"] = json::object();
  for (const auto& [name, e] : s.expressions) {
    Expr c = simplify(e);
    j["expressions"][name] = {{"text", c.str()}, {"tree", to_json(c)}};
  }
  j["tensors"] = json::object();
  for (const auto& [name, t] : s.tensors) {
    json val = json::array();
    for (auto v : t.valence()) val.push_back(v == Valence::Up ? "up" : "down");
    json comps = json::array();
    for (const auto& c : t.components()) comps.push_back(c.str());
    j["tensors"][name] = {{"valence", val}, {"components", comps}};
  }
  return j.dump(2) + "\n";
}

SessionArchive session_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw SessionError(std::string("malformed session file: ") + ex.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "cosmo-session") throw SessionError("not a session file");
    int version = j.at("version").get<int>();
    if (version != kSessionVersion)
      throw SessionVersionError("session version " + std::to_string(version) + " is not supported (expected " +
                                std::to_string(kSessionVersion) + ")");
    SessionArchive s;
    s.settings = j.at("settings").get<std::map<std::string, std::string>>();
    for (const auto& [name, ej] : j.at("expressions").items()) s.expressions[name] = expr_from_json(ej.at("tree"));
    for (const auto& [name, tj] : j.at("tensors").items()) {
      std::vector<Valence> val;
      for (const auto& v : tj.at("valence")) val.push_back(v.get<std::string>() == "up" ? Valence::Up : Valence::Down);
      Tensor t(name, val);
      const auto& comps = tj.at("components");
      if (comps.size() != t.components().size()) throw SessionError("tensor " + name + " has wrong component count");
      for (std::size_t i = 0; i < comps.size(); ++i) t.flat(i) = Canonical::of(parse(comps[i].get<std::string>()));
      s.tensors[name] = t;
    }
    return s;
  } catch (const json::exception& ex) {
    throw SessionError(std::string("malformed session file: ") + ex.what());
  } catch (const SessionError&) {
    throw;
  } catch (const Error& ex) {
    throw SessionError(std::string("malformed expression in session file: ") + ex.what());
  }
}

void save_session(const SessionArchive& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SessionError("cannot write " + path);
  out << session_to_string(s);
  if (!out) throw SessionError("cannot write " + path);
}

SessionArchive load_session(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SessionError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return session_from_string(ss.str());
}

}  // namespace cosmo
