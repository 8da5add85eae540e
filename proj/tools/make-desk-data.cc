// tools/make-desk-data.cc

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

// Regenerates the synthetic desk benchmark inputs.

#include <iostream>

#include "CLI11.hpp"
#include "pcfst/desk-data.h"

int main(int argc, char **argv) {
  CLI::App app{"make-desk-data: write the synthetic desk benchmark inputs"};
  std::string out = "data/desk";
  pcfst::DeskDataConfig config;
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", config.seed, "generator seed");
  app.add_option("--users", config.num_users, "number of users");
  app.add_option("--utterances-per-user", config.utterances_per_user, "test utterances per user");
  app.add_option("--contacts-per-user", config.contacts_per_user, "contacts per user");
  app.add_option("--warmup", config.warmup_utterances, "warm-up utterances");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    pcfst::DeskData data = pcfst::GenerateDeskData(config);
    pcfst::WriteDeskData(data, out);
    std::cout << data.test.size() << " test and " << data.warmup.size()
              << " warm-up utterances, " << data.contacts.size() << " contact entries written to "
              << out << "\n";
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
