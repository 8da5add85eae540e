// pcfst/fst-io.h

// Copyright 2026  The pcfst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented text format:
//
//   arc line:    src dst isym osym [weight]     (weight defaults to 0.0)
//   final line:  state [weight]
//
// The source state of the first line is the start state. A final line with
// weight "inf" declares a state without making it final; the writer emits
// one only when a state would otherwise be lost (an arc-less non-final start
// or highest-numbered state). With null symbol tables labels are integers.

#ifndef PCFST_FST_IO_H_
#define PCFST_FST_IO_H_

#include <iosfwd>
#include <memory>
#include <string>

#include "pcfst/fst.h"

namespace pcfst {

Fst ReadTextFst(std::istream &is, std::shared_ptr<const SymbolTable> isyms,
                std::shared_ptr<const SymbolTable> osyms);
Fst ReadTextFst(const std::string &text,
                std::shared_ptr<const SymbolTable> isyms = nullptr,
                std::shared_ptr<const SymbolTable> osyms = nullptr);

void WriteTextFst(const Fst &fst, std::ostream &os);
std::string WriteTextFst(const Fst &fst);

// File helpers; failures to open are DataError.
Fst ReadTextFstFile(const std::string &path,
                    std::shared_ptr<const SymbolTable> isyms,
                    std::shared_ptr<const SymbolTable> osyms);
void WriteTextFstFile(const Fst &fst, const std::string &path);
SymbolTable ReadSymbolTableFile(const std::string &path);
void WriteSymbolTableFile(const SymbolTable &syms, const std::string &path);

}  // namespace pcfst

#endif  // PCFST_FST_IO_H_
