// avsr/model/vocab.h

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

#ifndef AVSR_MODEL_VOCAB_H_
#define AVSR_MODEL_VOCAB_H_

#include <string>
#include <vector>

namespace avsr {

// The 40-symbol output alphabet:
//   0-25 'a'-'z', 26-35 '0'-'9', 36 space, 37 apostrophe, 38 eos, 39 pad.
// Index 40 is the mode extra: sos (seq2seq decoder input) or blank (CTC
// output). A model uses one or the other, never both.
class CharVocab {
 public:
  static constexpr int kSize = 40;
  static constexpr int kSpace = 36;
  static constexpr int kApostrophe = 37;
  static constexpr int kEos = 38;
  static constexpr int kPad = 39;
  static constexpr int kSos = 40;
  static constexpr int kBlank = 40;
  // Letters, digits, space and apostrophe.
  static constexpr int kNumText = 38;

  static bool IsText(int id) { return id >= 0 && id < kNumText; }
  static int Id(char c);  // throws DataError for characters outside the alphabet
  static char Char(int id);
  static std::vector<int> Encode(const std::string &text);
  // Text symbols only; eos, pad and the extra are dropped.
  static std::string Decode(const std::vector<int> &ids);
  // Lowercases and maps runs of whitespace to one space; other characters
  // are kept so Encode() can reject them.
  static std::string Normalize(const std::string &text);
  static std::string SymbolName(int id);
};

}  // namespace avsr

#endif  // AVSR_MODEL_VOCAB_H_
