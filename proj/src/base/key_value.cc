// base/key_value.cc

// Copyright 2026  The AVSR Toolkit Authors

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


#include "avsr/base/key_value.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "avsr/base/error.h"

namespace avsr {

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues ParseKeyValues(std::istream &is, const std::string &source) {
  KeyValues out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = Trim(line.substr(0, eq)), value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key " + key);
    out.emplace_back(key, value);
  }
  return out;
}

KeyValues ReadKeyValueFile(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  return ParseKeyValues(is, path);
}

void WriteKeyValues(std::ostream &os, const KeyValues &kv) {
  for (const auto &[k, v] : kv) os << k << " = " << v << "\n";
}

int ParseInt(const std::string &text, const std::string &what) {
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty())
    throw ConfigError(what + ": expected an integer, got '" + text + "'");
  return v;
}

uint64_t ParseUint64(const std::string &text, const std::string &what) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty())
    throw ConfigError(what + ": expected an unsigned integer, got '" + text + "'");
  return v;
}

double ParseDouble(const std::string &text, const std::string &what) {
  if (text == "inf" || text == "+inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty())
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  return v;
}

bool ParseBool(const std::string &text, const std::string &what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(what + ": expected true or false, got '" + text + "'");
}

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

void KeyValueBinder::Bind(const std::string &name, int *field) {
  Bind(name, [=](const std::string &s) { *field = ParseInt(s, name); },
       [=] { return std::to_string(*field); });
}

void KeyValueBinder::Bind(const std::string &name, uint64_t *field) {
  Bind(name, [=](const std::string &s) { *field = ParseUint64(s, name); },
       [=] { return std::to_string(*field); });
}

void KeyValueBinder::Bind(const std::string &name, double *field) {
  Bind(name, [=](const std::string &s) { *field = ParseDouble(s, name); },
       [=] { return FormatDouble(*field); });
}

void KeyValueBinder::Bind(const std::string &name, bool *field) {
  Bind(name, [=](const std::string &s) { *field = ParseBool(s, name); },
       [=] { return std::string(*field ? "true" : "false"); });
}

void KeyValueBinder::Bind(const std::string &name, std::string *field) {
  Bind(name, [=](const std::string &s) { *field = s; }, [=] { return *field; });
}

void KeyValueBinder::Bind(const std::string &name, Setter set, Getter get) {
  if (Has(name)) throw ConfigError("key bound twice: " + name);
  entries_.push_back({name, std::move(set), std::move(get)});
}

void KeyValueBinder::Include(const KeyValueBinder &other, const std::string &prefix) {
  for (const Entry &e : other.entries_) Bind(prefix + e.name, e.set, e.get);
}

bool KeyValueBinder::Has(const std::string &name) const {
  for (const Entry &e : entries_)
    if (e.name == name) return true;
  return false;
}

void KeyValueBinder::Set(const std::string &name, const std::string &value) const {
  for (const Entry &e : entries_)
    if (e.name == name) return e.set(value);
  throw ConfigError("unknown key: " + name);
}

void KeyValueBinder::Apply(const KeyValues &kv, const std::string &source) const {
  for (const auto &[k, v] : kv) {
    if (!Has(k)) throw ConfigError(source + ": unknown key " + k);
    Set(k, v);
  }
}

KeyValues KeyValueBinder::Dump() const {
  KeyValues out;
  for (const Entry &e : entries_) out.emplace_back(e.name, e.get());
  return out;
}

}  // namespace avsr
