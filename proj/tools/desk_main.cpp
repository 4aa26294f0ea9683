// Copyright 2026 The audiomt Authors.
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

// audiomt-desk: builds the shipped desk corpus and doubles as a toy TTS for
// text-producing relations (tts.command = "audiomt-desk speak {text} {wav}").

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "audiomt/wav.hpp"
#include "desk_synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Desk corpus generator and toy speech synthesizer", "audiomt-desk"};
  app.require_subcommand(1, 1);

  std::string dir;
  auto* generate = app.add_subcommand("generate", "Write the desk corpus");
  generate->add_option("dir", dir, "Target directory")->required();

  std::string text_path, wav_path;
  auto* speak = app.add_subcommand("speak", "Synthesize a text file");
  speak->add_option("text", text_path, "UTF-8 text")->required();
  speak->add_option("wav", wav_path, "Output WAV")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*generate) {
      audiomt::desk::generate_corpus(dir);
      return 0;
    }
    std::ifstream in(text_path);
    if (!in) throw std::runtime_error("cannot open " + text_path);
    std::istringstream words(std::string(std::istreambuf_iterator<char>(in), {}));
    std::vector<std::string> tokens{std::istream_iterator<std::string>(words), {}};
    audiomt::write_wav(audiomt::desk::speak(tokens, {}).audio, wav_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
