// Copyright 2026 The NOMAD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes a synthetic speech-like corpus for demos and tests.

#include <glog/logging.h>

#include <iostream>

#include "CLI11.hpp"
#include "nomad/speech_synth.h"

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;
  CLI::App app{"Generate synthetic speech-like utterances", "nomad_corpus"};
  std::string out;
  int count = 20;
  uint64_t seed = 0;
  nomad::SpeechSynthConfig config;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--count", count, "Number of utterances")->capture_default_str();
  app.add_option("--seed", seed, "Corpus seed")->capture_default_str();
  app.add_option("--duration", config.duration_s, "Seconds per utterance")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    const auto paths = nomad::WriteSyntheticCorpus(out, count, seed, config);
    LOG(INFO) << "wrote " << paths.size() << " utterances to " << out;
  } catch (const std::exception& e) {
    std::cerr << "nomad_corpus: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
