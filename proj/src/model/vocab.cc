// model/vocab.cc

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

#include "avsr/model/vocab.h"

#include <cctype>

#include "avsr/base/error.h"

namespace avsr {

int CharVocab::Id(char c) {
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= '0' && c <= '9') return 26 + (c - '0');
  if (c == ' ') return kSpace;
  if (c == '\'') return kApostrophe;
  throw DataError(std::string("vocab: character '") + c + "' is not in the alphabet");
}

char CharVocab::Char(int id) {
  if (id >= 0 && id < 26) return static_cast<char>('a' + id);
  if (id >= 26 && id < 36) return static_cast<char>('0' + id - 26);
  if (id == kSpace) return ' ';
  if (id == kApostrophe) return '\'';
  throw DataError("vocab: id " + std::to_string(id) + " has no character");
}

std::vector<int> CharVocab::Encode(const std::string &text) {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (char c : text) ids.push_back(Id(c));
  return ids;
}

std::string CharVocab::Decode(const std::vector<int> &ids) {
  std::string out;
  for (int id : ids)
    if (IsText(id)) out.push_back(Char(id));
  return out;
}

std::string CharVocab::Normalize(const std::string &text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string CharVocab::SymbolName(int id) {
  switch (id) {
    case kSpace: return "<space>";
    case kEos: return "<eos>";
    case kPad: return "<pad>";
    case kSos: return "<sos|blank>";
    default: return std::string(1, Char(id));
  }
}

}  // namespace avsr
