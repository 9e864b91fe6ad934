/* Copyright 2026 The banz Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// banz: train byte models, compress and decompress files, run the oracle.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "banz/bytes.hpp"
#include "banz/error.hpp"
#include "banz/pipeline.hpp"
#include "banz/trainer.hpp"
#include "banz/verify.hpp"

namespace {

using banz::ConfigError;

// Exit codes.
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitFormat = 4;
constexpr int kExitMismatch = 5;
constexpr int kExitDecode = 6;
constexpr int kExitNumeric = 7;
constexpr int kExitVerify = 8;
constexpr int kExitOther = 1;

// Plain key=value lines; '#' starts a comment. Keys are option names without
// the leading dashes.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long v = std::stoull(value, &used, 0);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  }
}

struct TrainArgs {
  std::string input;
  std::string out;
  std::string config;
  std::size_t epochs = 10;
  std::size_t batch = 4;
  std::size_t ctx = 8;
  std::size_t latent = 8;
  std::size_t embed = 16;
  std::size_t hidden = 64;
  std::uint64_t seed = 1;
  bool ascent = false;
  bool quiet = false;
};

// Config file values fill options not given on the command line.
void apply_config(TrainArgs& a, const CLI::App& cmd) {
  if (a.config.empty()) return;
  for (const auto& [key, value] : read_config(a.config)) {
    auto set = [&](const char* name, auto& field) {
      if (key != name) return false;
      if (cmd.count(std::string("--") + name) == 0) {
        field = static_cast<std::remove_reference_t<decltype(field)>>(parse_unsigned(key, value));
      }
      return true;
    };
    if (set("epochs", a.epochs) || set("batch", a.batch) || set("ctx", a.ctx) ||
        set("latent", a.latent) || set("embed", a.embed) || set("hidden", a.hidden) ||
        set("seed", a.seed)) {
      continue;
    }
    if (key == "sign") {
      if (cmd.count("--ascent") == 0) {
        if (value == "ascent") a.ascent = true;
        else if (value == "descent") a.ascent = false;
        else throw ConfigError("bad value for sign: '" + value + "'");
      }
      continue;
    }
    throw ConfigError("unknown config key '" + key + "'");
  }
}

int run_train(TrainArgs a, const CLI::App& cmd) {
  apply_config(a, cmd);
  banz::TrainConfig config;
  config.epochs = a.epochs;
  config.batch = a.batch;
  config.seed = a.seed;
  config.arch = {a.ctx, a.latent, a.embed, a.hidden};
  config.sign = a.ascent ? banz::AttentionSign::kAscent : banz::AttentionSign::kDescent;
  config.validate();
  const std::vector<std::uint8_t> corpus = banz::read_file(a.input);
  banz::TrainHooks hooks;
  if (!a.quiet) {
    hooks.on_epoch = [](const banz::EpochStats& s, const banz::TrainState&) {
      std::cout << banz::format_epoch(s) << std::endl;
    };
  }
  const banz::ModelSnapshot snapshot = banz::train(corpus, config, hooks);
  banz::save_snapshot(snapshot, a.out);
  return 0;
}

int run_compress(const std::string& input, const std::string& model, const std::string& out,
                 bool embed, bool sample) {
  const banz::ModelSnapshot snapshot = banz::load_snapshot(model);
  banz::CompressOptions options;
  options.embed_model = embed;
  options.sample_latent = sample;
  banz::write_file(out, banz::compress(banz::read_file(input), snapshot, options));
  return 0;
}

int run_decompress(const std::string& input, const std::string& model, const std::string& out) {
  const std::vector<std::uint8_t> container = banz::read_file(input);
  const banz::ContainerHeader header = banz::parse_header(container);
  std::vector<std::uint8_t> data;
  if (model.empty()) {
    if (!header.embedded()) throw ConfigError("container has no embedded model; pass --model");
    data = banz::decompress(container, nullptr);
  } else {
    const banz::ModelSnapshot snapshot = banz::load_snapshot(model);
    data = banz::decompress(container, &snapshot);
  }
  banz::write_file(out, data);
  return 0;
}

int run_stats(const std::string& input) {
  const banz::ContainerInfo info = banz::inspect(banz::read_file(input));
  const banz::ContainerHeader& h = info.header;
  std::printf("version          %u\n", h.version);
  std::printf("context length   %u\n", h.context_length);
  std::printf("latent dim       %u\n", h.latent_dim);
  std::printf("mode             0x%02x%s%s\n", h.mode, h.embedded() ? " embedded" : "",
              h.sampled_latent() ? " sampled-latent" : "");
  std::printf("original bytes   %llu\n", static_cast<unsigned long long>(h.original_length));
  std::printf("model hash       %016llx\n", static_cast<unsigned long long>(h.model_hash));
  std::printf("model bytes      %zu\n", info.model_bytes);
  std::printf("payload bytes    %zu\n", info.payload_bytes);
  std::printf("total bytes      %zu\n", info.total_bytes);
  std::printf("bits/byte        %.4f\n", info.bits_per_byte);
  return 0;
}

int run_verify(bool quick, std::uint64_t seed) {
  banz::VerifyOptions options;
  options.quick = quick;
  options.seed = seed;
  const std::vector<banz::CheckResult> results = banz::run_oracle_suite(options);
  std::cout << banz::format_report(results);
  return banz::all_passed(results) ? 0 : kExitVerify;
}

int fail(int code, const std::string& what) {
  std::cerr << "banz: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banz: lossless byte compression with a Bayesian attention model"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train a model snapshot on a file");
  train->add_option("--input", train_args.input, "Training corpus")->required();
  train->add_option("--out", train_args.out, "Snapshot output path")->required();
  train->add_option("--config", train_args.config, "key=value defaults file");
  train->add_option("--epochs", train_args.epochs, "Epochs T (learning rate 1/T)");
  train->add_option("--batch", train_args.batch, "Batch size B >= 2");
  train->add_option("--ctx", train_args.ctx, "Context length l");
  train->add_option("--latent", train_args.latent, "Latent dimension d");
  train->add_option("--embed", train_args.embed, "Byte embedding width");
  train->add_option("--hidden", train_args.hidden, "Hidden units");
  train->add_option("--seed", train_args.seed, "Random seed");
  train->add_flag("--ascent", train_args.ascent, "Flip the attention update sign");
  train->add_flag("--quiet", train_args.quiet, "No per-epoch log");

  std::string c_input, c_model, c_out;
  bool c_embed = false, c_sample = false;
  CLI::App* comp = app.add_subcommand("compress", "Compress a file");
  comp->add_option("--input", c_input)->required();
  comp->add_option("--model", c_model)->required();
  comp->add_option("--out", c_out)->required();
  comp->add_flag("--embed-model", c_embed, "Store the snapshot in the container");
  comp->add_flag("--sample-latent", c_sample, "Draw latent codes instead of the mean");

  std::string d_input, d_model, d_out;
  CLI::App* decomp = app.add_subcommand("decompress", "Decompress a container");
  decomp->add_option("--input", d_input)->required();
  decomp->add_option("--model", d_model, "Snapshot; optional for self-contained files");
  decomp->add_option("--out", d_out)->required();

  bool quick = false;
  std::uint64_t verify_seed = 2026;
  CLI::App* verify = app.add_subcommand("verify", "Run the brute-force oracle suite");
  verify->add_flag("--quick", quick, "Smaller sweeps");
  verify->add_option("--seed", verify_seed, "Oracle seed");

  std::string s_input;
  CLI::App* stats = app.add_subcommand("stats", "Print container header and bits/byte");
  stats->add_option("--input", s_input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, e.what());
  }

  try {
    if (*train) return run_train(train_args, *train);
    if (*comp) return run_compress(c_input, c_model, c_out, c_embed, c_sample);
    if (*decomp) return run_decompress(d_input, d_model, d_out);
    if (*verify) return run_verify(quick, verify_seed);
    if (*stats) return run_stats(s_input);
  } catch (const banz::ConfigError& e) {
    return fail(kExitConfig, e.what());
  } catch (const banz::FormatError& e) {
    return fail(kExitFormat, std::string("format error: ") + e.what());
  } catch (const banz::ModelMismatchError& e) {
    return fail(kExitMismatch, std::string("model mismatch: ") + e.what());
  } catch (const banz::DecodeError& e) {
    return fail(kExitDecode, std::string("decode error: ") + e.what());
  } catch (const banz::NumericError& e) {
    return fail(kExitNumeric, std::string("numeric error: ") + e.what());
  } catch (const std::exception& e) {
    return fail(kExitOther, e.what());
  }
  return kExitUsage;
}
