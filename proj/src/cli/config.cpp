#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "jampa/constants.hpp"
#include "jampa/error.hpp"

namespace jampa::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, "config " + where + ": " + what);
}

const json& object_at(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.contains(key)) fail(where, "missing required object \"" + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_object()) fail(where + "/" + key, "expected an object");
  return v;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(where + "/" + key, "unknown key");
  }
}

std::optional<double> number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + "/" + key, "expected a finite number");
  return x;
}

double required(const json& obj, const std::string& key, const std::string& where) {
  auto x = number(obj, key, where);
  if (!x) fail(where, "missing required number \"" + key + "\"");
  return *x;
}

std::string text(const json& obj, const std::string& key) {
  if (!obj.contains(key)) return {};
  if (!obj.at(key).is_string()) fail("/" + key, "expected a string");
  return obj.at(key).get<std::string>();
}

}  // namespace

DeviceConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("/", "expected an object");
  reject_unknown(doc, {"name", "notes", "snail", "array", "resonator"}, "");

  DeviceConfig cfg;
  cfg.name = text(doc, "name");
  cfg.notes = text(doc, "notes");

  const json& snail = object_at(doc, "snail", "");
  reject_unknown(snail, {"alpha", "L_J", "L_S"}, "/snail");
  double alpha = 0.1;
  if (auto a = number(snail, "alpha", "/snail")) {
    alpha = *a;
  } else {
    cfg.assumptions.push_back("snail.alpha not given; using 0.1");
  }
  const auto L_J = number(snail, "L_J", "/snail");
  const auto L_S = number(snail, "L_S", "/snail");
  if (L_J.has_value() == L_S.has_value()) fail("/snail", "exactly one of \"L_J\" or \"L_S\" is required");
  if (L_J) {
    cfg.device.array.snail = {alpha, *L_J};
  } else {
    if (!(*L_S > 0.0)) fail("/snail/L_S", "must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0)) fail("/snail/alpha", "must lie in [0, 1)");
    cfg.device.array.snail = snail_from_linear_inductance(alpha, *L_S);
  }

  const json& array = object_at(doc, "array", "");
  reject_unknown(array, {"M", "a", "C_0", "C_S", "flux_frac"}, "/array");
  if (!array.contains("M") || !array.at("M").is_number_integer()) fail("/array/M", "expected an integer");
  const auto M = array.at("M").get<long long>();
  if (M < 1 || M > 1'000'000) fail("/array/M", "must lie in [1, 1000000]");
  auto& arr = cfg.device.array;
  arr.M = static_cast<int>(M);
  arr.a = number(array, "a", "/array").value_or(1.0);
  arr.C_0 = required(array, "C_0", "/array");
  arr.C_S = required(array, "C_S", "/array");
  arr.flux_frac = number(array, "flux_frac", "/array").value_or(0.0);

  const json& res = object_at(doc, "resonator", "");
  reject_unknown(res, {"Z_c", "v_r", "d_r", "fundamental_Hz"}, "/resonator");
  auto& r = cfg.device.resonator;
  r.Z_c = required(res, "Z_c", "/resonator");
  r.v_r = required(res, "v_r", "/resonator");
  const auto d_r = number(res, "d_r", "/resonator");
  cfg.fundamental_Hz = number(res, "fundamental_Hz", "/resonator");
  if (d_r.has_value() == cfg.fundamental_Hz.has_value()) {
    fail("/resonator", "exactly one of \"d_r\" or \"fundamental_Hz\" is required");
  }

  try {
    arr.validate();
    if (d_r) {
      r.d_r = *d_r;
      r.validate();
    } else {
      if (!(*cfg.fundamental_Hz > 0.0)) fail("/resonator/fundamental_Hz", "must be positive");
      r.d_r = 0.0;
      r.validate();
      try {
        r.d_r = resonator_length_for(constants::two_pi * *cfg.fundamental_Hz, arr, r.Z_c, r.v_r);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoPositiveLength) throw;
        cfg.assumptions.push_back("array alone sets the fundamental below fundamental_Hz; using d_r = 0");
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) fail("", e.what());
    throw;
  }
  return cfg;
}

DeviceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, "config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace jampa::cli
