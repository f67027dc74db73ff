// Copyright 2026 The cmdshim Authors.
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

// cmdshim: normalize, gen-data, eval, replay, repl and serve.
// Structured output goes to stdout as JSON; logs go to stderr.

#include <signal.h>
#include <unistd.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cmdshim/cmdshim.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitClarify = 2;
constexpr int kExitSuggest = 3;
constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitUnavailable = 69;
constexpr int kExitSoftware = 70;
constexpr int kExitCantCreate = 73;

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0   success (normalize: corrected or already canonical)\n"
    "  2   normalize: the utterance needs a clarification answer\n"
    "  3   normalize: only suggestions could be offered\n"
    "  64  usage error: unknown flag, bad value or bad config file\n"
    "  65  malformed input data, or an infeasible dataset spec\n"
    "  66  an input file is missing or unreadable\n"
    "  69  serve: the address is already in use\n"
    "  70  internal error\n"
    "  73  gen-data: the output directory cannot be written\n"
    "\n"
    "Settings resolve as flags, then CMDSHIM_* environment variables, then the\n"
    "JSON --config file (keys named as in [config: ...]), then defaults.";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void Log(const std::string& msg) { std::cerr << "cmdshim: " << msg << "\n"; }

int Fail(cmdshim_status s, int io_exit = kExitNoInput) {
  Log(std::string(cmdshim_status_string(s)) + ": " + cmdshim_last_error());
  switch (s) {
    case CMDSHIM_OK:
      return kExitOk;
    case CMDSHIM_INVALID_ARGUMENT:
      return kExitUsage;
    case CMDSHIM_PARSE_ERROR:
    case CMDSHIM_INFEASIBLE:
      return kExitDataErr;
    case CMDSHIM_IO_ERROR:
      return io_exit;
    case CMDSHIM_UNAVAILABLE:
      return kExitUnavailable;
    case CMDSHIM_INTERNAL:
      break;
  }
  return kExitSoftware;
}

std::string Take(char* s) {
  std::string out = s ? s : "";
  cmdshim_string_free(s);
  return out;
}

struct NormalizerDeleter {
  void operator()(cmdshim_normalizer* n) const { cmdshim_normalizer_free(n); }
};
struct SessionDeleter {
  void operator()(cmdshim_session* s) const { cmdshim_session_free(s); }
};
struct GatewayDeleter {
  void operator()(cmdshim_gateway* g) const { cmdshim_gateway_free(g); }
};
using NormalizerPtr = std::unique_ptr<cmdshim_normalizer, NormalizerDeleter>;
using SessionPtr = std::unique_ptr<cmdshim_session, SessionDeleter>;
using GatewayPtr = std::unique_ptr<cmdshim_gateway, GatewayDeleter>;

template <typename T>
T ParseEnv(const char* name, const std::string& text) {
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    T value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
      throw UsageError(std::string(name) + ": not a valid number: " + text);
    }
    return value;
  }
}

template <typename T>
T FromConfig(const json& cfg, const char* key) {
  const json& v = cfg.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw UsageError(std::string("config ") + key + " must be a string");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) {
      throw UsageError(std::string("config ") + key + " must be a non-negative integer");
    }
  } else {
    if (!v.is_number_integer()) throw UsageError(std::string("config ") + key + " must be an integer");
  }
  return v.get<T>();
}

// Registers flags whose unset values fall back to the environment, then the
// config file. Resolution runs after parsing, for the chosen subcommand.
class Settings {
 public:
  template <typename T>
  CLI::Option* Bind(CLI::App* sub, const std::string& flag, T* target, const char* env,
                    const char* key, const std::string& help) {
    std::string full = help + " [env: " + env + "] [config: " + key + "]";
    CLI::Option* opt = sub->add_option(flag, *target, full)->capture_default_str();
    resolvers_[sub].push_back([opt, target, env, key](const json& cfg) {
      if (opt->count() > 0) return;
      if (const char* v = std::getenv(env); v && *v) {
        *target = ParseEnv<T>(env, v);
      } else if (cfg.contains(key)) {
        *target = FromConfig<T>(cfg, key);
      }
    });
    return opt;
  }

  void Resolve(CLI::App* sub, const json& cfg) const {
    auto it = resolvers_.find(sub);
    if (it == resolvers_.end()) return;
    for (const auto& r : it->second) r(cfg);
  }

 private:
  std::map<CLI::App*, std::vector<std::function<void(const json&)>>> resolvers_;
};

json LoadConfig(std::string path) {
  if (path.empty()) {
    if (const char* v = std::getenv("CMDSHIM_CONFIG"); v && *v) path = v;
  }
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file " + path);
  json cfg = json::parse(in, nullptr, false);
  if (cfg.is_discarded() || !cfg.is_object()) {
    throw UsageError("config file " + path + " is not a JSON object");
  }
  return cfg;
}

struct BackendFlags {
  std::string backend = "rule";
  std::string lexicon;
  int threshold = -1;
};

void AddBackendFlags(Settings& s, CLI::App* sub, BackendFlags* f) {
  s.Bind(sub, "--backend", &f->backend, "CMDSHIM_BACKEND", "backend",
         "normalizer backend: rule or stub")
      ->check(CLI::IsMember({"rule", "stub"}));
  s.Bind(sub, "--lexicon", &f->lexicon, "CMDSHIM_LEXICON", "lexicon",
         "lexicon file (built-in when empty)");
  s.Bind(sub, "--threshold", &f->threshold, "CMDSHIM_THRESHOLD", "threshold",
         "auto-apply confidence floor 0..100 (-1 keeps the lexicon's)");
}

int MakeNormalizer(const BackendFlags& f, NormalizerPtr* out) {
  cmdshim_normalizer* n = nullptr;
  cmdshim_status s = cmdshim_normalizer_new(f.backend.c_str(), f.lexicon.c_str(), f.threshold, &n);
  if (s != CMDSHIM_OK) return Fail(s);
  out->reset(n);
  return kExitOk;
}

std::string SessionConfigJson(int64_t window_ms) {
  return json{{"window_ms", window_ms}}.dump();
}

// --- normalize -------------------------------------------------------------

struct NormalizeArgs {
  BackendFlags backend;
  std::string utterance;
  std::string selection;
  std::vector<std::string> history;
};

int RunNormalize(const NormalizeArgs& a) {
  NormalizerPtr n;
  if (int rc = MakeNormalizer(a.backend, &n)) return rc;
  std::vector<const char*> history;
  for (const auto& h : a.history) history.push_back(h.c_str());
  cmdshim_result_kind kind;
  char* out = nullptr;
  cmdshim_status s = cmdshim_normalize(n.get(), a.utterance.c_str(), a.selection.c_str(),
                                       history.data(), history.size(), &kind, &out);
  if (s != CMDSHIM_OK) return Fail(s);
  std::cout << json::parse(Take(out)).dump(2) << "\n";
  switch (kind) {
    case CMDSHIM_RESULT_CLARIFY:
      return kExitClarify;
    case CMDSHIM_RESULT_SUGGEST:
      return kExitSuggest;
    default:
      return kExitOk;
  }
}

// --- gen-data --------------------------------------------------------------

struct GenDataArgs {
  std::string out_dir = "dataset";
  uint64_t seed = 20250101;
  size_t train = 1000;
  size_t val = 400;
  size_t test = 150;
};

int RunGenData(const GenDataArgs& a) {
  json spec = {{"seed", a.seed}, {"train", a.train}, {"val", a.val}, {"test", a.test}};
  char* manifest = nullptr;
  cmdshim_status s = cmdshim_generate_dataset(spec.dump().c_str(), a.out_dir.c_str(), &manifest);
  if (s != CMDSHIM_OK) return Fail(s, kExitCantCreate);
  Log("wrote train/val/test.jsonl and manifest.json to " + a.out_dir);
  std::cout << Take(manifest) << "\n";
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  BackendFlags backend;
  std::string data;
  std::string format = "json";
  std::string report;
};

int RunEval(const EvalArgs& a) {
  if (a.data.empty()) throw UsageError("--data is required");
  NormalizerPtr n;
  if (int rc = MakeNormalizer(a.backend, &n)) return rc;
  char* out = nullptr;
  cmdshim_status s = cmdshim_evaluate(n.get(), a.data.c_str(), CMDSHIM_FORMAT_JSON, &out);
  if (s != CMDSHIM_OK) return Fail(s);
  const std::string report = Take(out);
  if (!a.report.empty()) {
    std::ofstream f(a.report, std::ios::binary | std::ios::trunc);
    if (!(f << report << "\n")) {
      Log("cannot write report " + a.report);
      return kExitCantCreate;
    }
    Log("wrote " + a.report);
  }
  if (a.format == "table") {
    s = cmdshim_evaluate(n.get(), a.data.c_str(), CMDSHIM_FORMAT_TABLE, &out);
    if (s != CMDSHIM_OK) return Fail(s);
    std::cout << Take(out);
  } else {
    std::cout << report << "\n";
  }
  return kExitOk;
}

// --- replay ----------------------------------------------------------------

struct ReplayArgs {
  BackendFlags backend;
  std::string corpus;
  uint64_t seed = 1;
  uint64_t jitter_min_ms = 200;
  uint64_t jitter_max_ms = 2500;
  uint64_t legacy_window_ms = 1500;
  uint64_t window_ms = 3000;
  std::string format = "json";
};

int RunReplay(const ReplayArgs& a) {
  std::string corpus = a.corpus;
  if (corpus.empty()) corpus = CMDSHIM_DATA_DIR "/incorrect_commands.jsonl";
  NormalizerPtr n;
  if (int rc = MakeNormalizer(a.backend, &n)) return rc;
  json cfg = {{"seed", a.seed},
              {"jitter_min_ms", a.jitter_min_ms},
              {"jitter_max_ms", a.jitter_max_ms},
              {"legacy_window_ms", a.legacy_window_ms},
              {"shim_window_ms", a.window_ms}};
  char* out = nullptr;
  cmdshim_status s =
      cmdshim_replay(n.get(), corpus.c_str(), cfg.dump().c_str(),
                     a.format == "table" ? CMDSHIM_FORMAT_TABLE : CMDSHIM_FORMAT_JSON, &out);
  if (s != CMDSHIM_OK) return Fail(s);
  std::cout << Take(out) << (a.format == "table" ? "" : "\n");
  return kExitOk;
}

// --- repl ------------------------------------------------------------------

struct ReplArgs {
  BackendFlags backend;
  std::string text;
  std::string corrections;
  int64_t window_ms = 3000;
};

int RunRepl(const ReplArgs& a) {
  NormalizerPtr n;
  if (int rc = MakeNormalizer(a.backend, &n)) return rc;
  cmdshim_session* raw = nullptr;
  cmdshim_status s = cmdshim_session_new(n.get(), a.text.c_str(),
                                         SessionConfigJson(a.window_ms).c_str(),
                                         a.corrections.c_str(), &raw);
  if (s != CMDSHIM_OK) return Fail(s);
  SessionPtr session(raw);
  const bool interactive = ::isatty(STDIN_FILENO);
  if (interactive) Log("type an utterance; :state shows the buffer, :quit exits");
  std::string line;
  while (true) {
    if (interactive) std::cerr << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    char* out = nullptr;
    if (line == ":quit") break;
    if (line == ":state") {
      s = cmdshim_session_state(session.get(), &out);
      if (s != CMDSHIM_OK) return Fail(s);
      std::cout << Take(out) << std::endl;
      continue;
    }
    s = cmdshim_session_utter(session.get(), line.c_str(), &out);
    if (s == CMDSHIM_INVALID_ARGUMENT) {
      Log(cmdshim_last_error());
      continue;
    }
    if (s != CMDSHIM_OK) return Fail(s);
    for (const json& e : json::parse(Take(out))) std::cout << e.dump() << "\n";
    std::cout << std::flush;
  }
  return kExitOk;
}

// --- serve -----------------------------------------------------------------

struct ServeArgs {
  BackendFlags backend;
  std::string address = "127.0.0.1";
  uint16_t port = 8765;
  std::string corrections;
  int64_t window_ms = 3000;
};

int RunServe(const ServeArgs& a) {
  NormalizerPtr n;
  if (int rc = MakeNormalizer(a.backend, &n)) return rc;
  // Block the stop signals before any thread starts; one thread waits for them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  cmdshim_gateway* raw = nullptr;
  cmdshim_status s =
      cmdshim_gateway_start(n.get(), a.address.c_str(), a.port,
                            SessionConfigJson(a.window_ms).c_str(), a.corrections.c_str(), &raw);
  if (s != CMDSHIM_OK) return Fail(s);
  GatewayPtr gateway(raw);
  const uint16_t port = cmdshim_gateway_port(gateway.get());
  std::cout << json{{"address", a.address}, {"port", port}, {"websocket", "/session"},
                    {"health", "/healthz"}}
                   .dump()
            << std::endl;
  Log("serving ws://" + a.address + ":" + std::to_string(port) + "/session");

  std::thread stopper([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    Log(std::string("received ") + (sig == SIGINT ? "SIGINT" : "SIGTERM") + ", stopping");
    cmdshim_gateway_stop(gateway.get());
  });
  cmdshim_gateway_wait(gateway.get());
  stopper.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalizes spoken editing commands for a command-driven voice UI."};
  app.name("cmdshim");
  app.set_version_flag("--version", std::string(cmdshim_version()));
  app.require_subcommand(1);
  app.footer(kExitCodeHelp);
  std::string config_path;
  app.add_option("--config", config_path, "JSON settings file [env: CMDSHIM_CONFIG]");

  Settings settings;

  NormalizeArgs norm;
  CLI::App* norm_cmd = app.add_subcommand("normalize", "normalize one utterance and print the result");
  norm_cmd->add_option("-u,--utterance", norm.utterance, "what the user said")->required();
  norm_cmd->add_option("-s,--selection", norm.selection, "currently selected text");
  norm_cmd->add_option("--history", norm.history,
                       "recent canonical commands, most recent first (repeatable)");
  AddBackendFlags(settings, norm_cmd, &norm.backend);

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate train/val/test JSONL files");
  settings.Bind(gen_cmd, "-o,--out-dir", &gen.out_dir, "CMDSHIM_OUT_DIR", "out_dir",
                "output directory");
  settings.Bind(gen_cmd, "--seed", &gen.seed, "CMDSHIM_SEED", "seed", "generator seed");
  settings.Bind(gen_cmd, "--train", &gen.train, "CMDSHIM_TRAIN", "train", "training samples");
  settings.Bind(gen_cmd, "--val", &gen.val, "CMDSHIM_VAL", "val", "validation samples");
  settings.Bind(gen_cmd, "--test", &gen.test, "CMDSHIM_TEST", "test", "test samples");

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a backend on a JSONL dataset");
  settings.Bind(eval_cmd, "-d,--data", &ev.data, "CMDSHIM_DATA", "data", "dataset JSONL file");
  eval_cmd->add_option("--format", ev.format, "stdout format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  eval_cmd->add_option("--report", ev.report, "also write the JSON report to this file");
  AddBackendFlags(settings, eval_cmd, &ev.backend);

  ReplayArgs rp;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "compare the legacy VUI and the shim on an utterance corpus");
  settings.Bind(replay_cmd, "-c,--corpus", &rp.corpus, "CMDSHIM_CORPUS", "corpus",
                "corpus JSONL (shipped incorrect-command corpus when empty)");
  settings.Bind(replay_cmd, "--seed", &rp.seed, "CMDSHIM_SEED", "seed", "gap jitter seed");
  settings.Bind(replay_cmd, "--jitter-min-ms", &rp.jitter_min_ms, "CMDSHIM_JITTER_MIN_MS",
                "jitter_min_ms", "shortest inter-word gap");
  settings.Bind(replay_cmd, "--jitter-max-ms", &rp.jitter_max_ms, "CMDSHIM_JITTER_MAX_MS",
                "jitter_max_ms", "longest inter-word gap");
  settings.Bind(replay_cmd, "--legacy-window-ms", &rp.legacy_window_ms,
                "CMDSHIM_LEGACY_WINDOW_MS", "legacy_window_ms", "legacy VUI silence window");
  settings.Bind(replay_cmd, "--window-ms", &rp.window_ms, "CMDSHIM_WINDOW_MS", "window_ms",
                "shim silence window");
  replay_cmd->add_option("--format", rp.format, "stdout format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  AddBackendFlags(settings, replay_cmd, &rp.backend);

  ReplArgs repl;
  CLI::App* repl_cmd =
      app.add_subcommand("repl", "line-oriented session; prints session events as JSON lines");
  repl_cmd->add_option("-t,--text", repl.text, "initial buffer text");
  settings.Bind(repl_cmd, "--corrections", &repl.corrections, "CMDSHIM_CORRECTIONS",
                "corrections", "correction list file (built-in when empty)");
  settings.Bind(repl_cmd, "--window-ms", &repl.window_ms, "CMDSHIM_WINDOW_MS", "window_ms",
                "shim silence window");
  AddBackendFlags(settings, repl_cmd, &repl.backend);

  ServeArgs serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "run the WebSocket gateway");
  settings.Bind(serve_cmd, "--address", &serve.address, "CMDSHIM_ADDRESS", "address",
                "listen address");
  settings.Bind(serve_cmd, "-p,--port", &serve.port, "CMDSHIM_PORT", "port",
                "listen port (0 picks a free port)");
  settings.Bind(serve_cmd, "--corrections", &serve.corrections, "CMDSHIM_CORRECTIONS",
                "corrections", "correction list file (built-in when empty)");
  settings.Bind(serve_cmd, "--window-ms", &serve.window_ms, "CMDSHIM_WINDOW_MS", "window_ms",
                "shim silence window");
  AddBackendFlags(settings, serve_cmd, &serve.backend);

  for (CLI::App* sub : app.get_subcommands({})) sub->footer(kExitCodeHelp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    settings.Resolve(chosen, LoadConfig(config_path));
    if (chosen == norm_cmd) return RunNormalize(norm);
    if (chosen == gen_cmd) return RunGenData(gen);
    if (chosen == eval_cmd) return RunEval(ev);
    if (chosen == replay_cmd) return RunReplay(rp);
    if (chosen == repl_cmd) return RunRepl(repl);
    if (chosen == serve_cmd) return RunServe(serve);
  } catch (const UsageError& e) {
    Log(e.what());
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    Log(e.what());
    return kExitNoInput;
  } catch (const std::exception& e) {
    Log(std::string("internal error: ") + e.what());
    return kExitSoftware;
  }
  return kExitUsage;
}
