// avsr/base/key_value.h

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


#ifndef AVSR_BASE_KEY_VALUE_H_
#define AVSR_BASE_KEY_VALUE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace avsr {

// Ordered "key = value" pairs. '#' starts a comment; blank lines are
// ignored; repeated keys are an error.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues ParseKeyValues(std::istream &is, const std::string &source);
KeyValues ReadKeyValueFile(const std::string &path);
void WriteKeyValues(std::ostream &os, const KeyValues &kv);

// Binds names to fields so a struct can be read from and written to
// KeyValues. Unknown keys and malformed values throw ConfigError.
class KeyValueBinder {
 public:
  using Setter = std::function<void(const std::string &)>;
  using Getter = std::function<std::string()>;

  void Bind(const std::string &name, int *field);
  void Bind(const std::string &name, uint64_t *field);
  void Bind(const std::string &name, double *field);
  void Bind(const std::string &name, bool *field);
  void Bind(const std::string &name, std::string *field);
  void Bind(const std::string &name, Setter set, Getter get);
  // Appends every binding of other, names prefixed.
  void Include(const KeyValueBinder &other, const std::string &prefix = "");

  // Keys must be bound; unmentioned fields keep their values.
  void Apply(const KeyValues &kv, const std::string &source = "config") const;
  void Set(const std::string &name, const std::string &value) const;
  bool Has(const std::string &name) const;
  KeyValues Dump() const;

 private:
  struct Entry {
    std::string name;
    Setter set;
    Getter get;
  };
  std::vector<Entry> entries_;
};

int ParseInt(const std::string &text, const std::string &what);
uint64_t ParseUint64(const std::string &text, const std::string &what);
double ParseDouble(const std::string &text, const std::string &what);
bool ParseBool(const std::string &text, const std::string &what);
// Shortest text that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace avsr

#endif  // AVSR_BASE_KEY_VALUE_H_
