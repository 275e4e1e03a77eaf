// Copyright 2026 The Tilewright Authors
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

// tilewright: inspect, simulate, verify and emit tile kernels.
// Exit codes: 0 success, 1 verification failure, 2 usage or spec error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tilewright/tilewright.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitError = 2;

struct Options {
  std::string kernel;
  std::vector<std::string> binds;
  std::vector<std::string> inputs;
  uint64_t seed = 0;
  double tol = -1.0;
  bool all = false;
  std::string output;
  std::string out_dir;
  std::string format = "text";
};

// Failure carrying the library status, reported by main.
struct CliError {
  std::string status;
  std::string message;
};

[[noreturn]] void Throw(tw_status s) {
  throw CliError{tw_status_name(s), tw_last_error()};
}

[[noreturn]] void Usage(const std::string& msg) {
  throw CliError{"usage", msg};
}

void Check(tw_status s) {
  if (s != TW_OK) Throw(s);
}

// Owns a string returned by the library.
std::string Take(char* s) {
  std::string out = s ? s : "";
  tw_string_free(s);
  return out;
}

class Kernel {
 public:
  explicit Kernel(const std::string& name_or_path) {
    Check(tw_kernel_open(name_or_path.c_str(), &k_));
  }
  ~Kernel() { tw_kernel_free(k_); }
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;
  tw_kernel* get() const { return k_; }

 private:
  tw_kernel* k_ = nullptr;
};

Json ParseBinds(const std::vector<std::string>& binds) {
  Json out = Json::object();
  for (const std::string& group : binds) {
    std::stringstream ss(group);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const size_t eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        Usage("--bind expects SYM=INT, got '" + item + "'");
      }
      const std::string name = item.substr(0, eq);
      const std::string text = item.substr(eq + 1);
      int64_t v = 0;
      size_t used = 0;
      try {
        v = std::stoll(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size()) {
        Usage("--bind value for '" + name + "' is not an integer: '" + text + "'");
      }
      if (v < 1) Usage("--bind value for '" + name + "' must be positive");
      if (out.contains(name)) Usage("'" + name + "' is bound twice");
      out[name] = v;
    }
  }
  return out;
}

Json ParseInputs(const std::vector<std::string>& inputs) {
  Json out = Json::object();
  for (const std::string& item : inputs) {
    const size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      Usage("--input expects PARAM=PATH, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::string Tuple(const Json& list) {
  std::string s = "(";
  for (size_t i = 0; i < list.size(); ++i) {
    if (i) s += ", ";
    s += list[i].is_string() ? list[i].get<std::string>() : list[i].dump();
  }
  if (list.size() == 1) s += ",";
  return s + ")";
}

bool AllKnown(const Json& values) {
  for (const Json& v : values) {
    if (v.is_null()) return false;
  }
  return true;
}

std::string BindingText(const Json& b) {
  std::string s;
  for (const auto& [k, v] : b.items()) {
    if (!s.empty()) s += ",";
    s += k + "=" + v.dump();
  }
  return s.empty() ? "-" : s;
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CliError{"io", "cannot open '" + path + "' for writing"};
  f << text;
  f.close();
  if (!f) throw CliError{"io", "write to '" + path + "' failed"};
}

// Each command fills `report` and returns its exit code.
int ListKernels(const Options&, Json& report, std::ostream& text) {
  char* s = nullptr;
  Check(tw_catalog_names(&s));
  report["kernels"] = Json::parse(Take(s));
  for (const Json& n : report["kernels"]) text << n.get<std::string>() << "\n";
  return kExitOk;
}

int Inspect(const Options& o, Json& report, std::ostream& text) {
  const Json bind = ParseBinds(o.binds);
  Kernel k(o.kernel);
  char* s = nullptr;
  Check(tw_kernel_inspect(k.get(), bind.dump().c_str(), &s));
  report = Json::parse(Take(s));

  const Json& grid = report["grid"];
  text << "kernel " << report["kernel"].get<std::string>() << "\n";
  text << "grid " << Tuple(grid["sizes"]);
  if (AllKnown(grid["size_values"])) text << " = " << Tuple(grid["size_values"]);
  text << "\n";
  text << "grid total " << grid["total"].get<std::string>();
  if (!grid["total_value"].is_null()) text << " = " << grid["total_value"].dump();
  text << "\n";
  for (const Json& p : report["params"]) {
    text << "param " << p["name"].get<std::string>() << " ("
         << p["role"].get<std::string>() << ", " << p["kind"].get<std::string>()
         << ", rank " << p["rank"].dump() << ")\n";
    int level = 0;
    for (const Json& l : p["levels"]) {
      text << "  level " << level++ << " " << Tuple(l["shape"]);
      if (AllKnown(l["values"])) text << " = " << Tuple(l["values"]);
      text << "\n";
    }
    text << "  offset " << p["offset"].get<std::string>() << "\n";
    text << "  mask ";
    if (p["mask"].empty()) text << "none";
    for (size_t i = 0; i < p["mask"].size(); ++i) {
      const std::string term = p["mask"][i];
      text << (i ? " & " : "")
           << (p["mask"].size() > 1 ? "(" + term + ")" : term);
    }
    text << "\n";
  }
  std::string violated;
  if (!report["launch_checks"].empty()) text << "launch checks\n";
  for (const Json& c : report["launch_checks"]) {
    const std::string status = c["status"];
    text << "  " << c["lhs"].get<std::string>() << " == "
         << c["rhs"].get<std::string>() << "  [" << status << "] "
         << c["what"].get<std::string>() << "\n";
    if (status == "violated" && violated.empty()) {
      violated = c["what"].get<std::string>() + ": " +
                 c["lhs"].get<std::string>() + " = " + c["lhs_value"].dump() +
                 " but " + c["rhs"].get<std::string>() + " = " +
                 c["rhs_value"].dump();
    }
  }
  if (!violated.empty()) {
    throw CliError{"launch", "bindings violate a launch check (" + violated + ")"};
  }
  return kExitOk;
}

int Verify(const Options& o, Json& report, std::ostream& text) {
  Json req;
  req["bind"] = ParseBinds(o.binds);
  req["seed"] = o.seed;
  if (o.tol >= 0) req["tolerance"] = o.tol;
  req["all"] = o.all;
  Kernel k(o.kernel);
  char* s = nullptr;
  Check(tw_kernel_verify(k.get(), req.dump().c_str(), &s));
  report = Json::parse(Take(s));
  for (const Json& r : report["results"]) {
    text << (r["passed"].get<bool>() ? "PASS" : "FAIL") << " "
         << r["kernel"].get<std::string>() << " dims " << BindingText(r["dims"])
         << " meta " << BindingText(r["meta"])
         << (r["constant_rows"].get<bool>() ? " constant-rows" : "")
         << " max-abs " << r["max_abs"].dump() << " max-rel "
         << r["max_rel"].dump() << " tol " << r["tolerance"].dump()
         << (r["coverage_ok"].get<bool>() ? "" : " coverage-error") << "\n";
  }
  const int64_t n = report["configs"], failed = report["failures"];
  text << report["kernel"].get<std::string>() << ": " << (n - failed) << "/"
       << n << " configurations passed\n";
  return report["passed"].get<bool>() ? kExitOk : kExitFailed;
}

int Simulate(const Options& o, Json& report, std::ostream& text) {
  Json req;
  req["bind"] = ParseBinds(o.binds);
  req["seed"] = o.seed;
  req["inputs"] = ParseInputs(o.inputs);
  if (!o.out_dir.empty()) req["out_dir"] = o.out_dir;
  Kernel k(o.kernel);
  char* s = nullptr;
  Check(tw_kernel_simulate(k.get(), req.dump().c_str(), &s));
  report = Json::parse(Take(s));
  text << "kernel " << report["kernel"].get<std::string>() << "\n";
  text << "meta " << BindingText(report["meta"]) << "\n";
  text << "programs " << report["programs"].dump() << "\n";
  text << "output " << report["output"].get<std::string>() << " "
       << Tuple(report["output_shape"]) << "\n";
  if (report.contains("max_abs_vs_oracle")) {
    text << "max-abs vs oracle " << report["max_abs_vs_oracle"].dump() << "\n";
  }
  if (report.contains("files")) {
    for (const auto& [name, path] : report["files"].items()) {
      text << "wrote " << path.get<std::string>() << "\n";
    }
  }
  return kExitOk;
}

int Emit(const Options& o, Json& report, std::ostream& text) {
  Kernel k(o.kernel);
  char* src = nullptr;
  char* manifest = nullptr;
  Check(tw_kernel_emit(k.get(), &src, &manifest));
  const std::string source = Take(src);
  const std::string manifest_text = Take(manifest);
  const Json m = Json::parse(manifest_text);

  std::string path = o.output;
  if (path.empty()) {
    char* name = nullptr;
    Check(tw_kernel_name(k.get(), &name));
    path = Take(name) + ".py";
  }
  std::string stem = path;
  if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, ".py") == 0) {
    stem.resize(stem.size() - 3);
  }
  const std::string manifest_path = stem + ".manifest.json";
  WriteFile(path, source);
  WriteFile(manifest_path, manifest_text);

  report["kernel"] = m["kernel"];
  report["grid"] = m["grid"];
  report["launcher"] = m["launcher"];
  report["source"] = path;
  report["manifest"] = manifest_path;
  text << "kernel " << m["kernel"].get<std::string>() << "\n";
  text << "grid " << m["grid"].get<std::string>() << "\n";
  text << "launcher " << m["launcher"].get<std::string>() << "\n";
  text << "wrote " << path << "\n";
  text << "wrote " << manifest_path << "\n";
  return kExitOk;
}

void AddKernel(CLI::App* cmd, Options& o) {
  cmd->add_option("kernel", o.kernel, "Catalog kernel name or JSON spec path")
      ->required();
}

void AddBind(CLI::App* cmd, Options& o) {
  cmd->add_option("--bind", o.binds, "SYM=INT[,SYM=INT...] (repeatable)");
}

void AddSeed(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Input generation seed");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"tilewright: tile kernel compiler and simulator"};
  app.require_subcommand(1);
  app.add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* list = app.add_subcommand("list-kernels", "List catalog kernels");
  auto* inspect = app.add_subcommand("inspect", "Show arrangement, grid and index maps");
  AddKernel(inspect, o);
  AddBind(inspect, o);
  auto* simulate = app.add_subcommand("simulate", "Run the kernel on the CPU simulator");
  AddKernel(simulate, o);
  AddBind(simulate, o);
  AddSeed(simulate, o);
  simulate->add_option("--input", o.inputs, "PARAM=PATH tensor file (repeatable)");
  simulate->add_option("--out-dir", o.out_dir,
                       "Write tensors, expected output and meta.json here");
  auto* verify = app.add_subcommand("verify", "Compare the simulator with the oracle");
  AddKernel(verify, o);
  AddBind(verify, o);
  AddSeed(verify, o);
  verify->add_option("--tol", o.tol, "Max-abs tolerance")->check(CLI::NonNegativeNumber);
  verify->add_flag("--all", o.all, "Run the randomized configuration matrix");
  auto* emit = app.add_subcommand("emit", "Write Triton source and manifest");
  AddKernel(emit, o);
  emit->add_option("-o,--output", o.output, "Source path (default <kernel>.py)");

  for (CLI::App* cmd : {list, inspect, simulate, verify, emit}) {
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"text", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  Json envelope;
  envelope["command"] = name;
  Json report = Json::object();
  std::ostringstream text;
  int code = kExitOk;
  try {
    if (cmd == list) code = ListKernels(o, report, text);
    if (cmd == inspect) code = Inspect(o, report, text);
    if (cmd == simulate) code = Simulate(o, report, text);
    if (cmd == verify) code = Verify(o, report, text);
    if (cmd == emit) code = Emit(o, report, text);
  } catch (const CliError& e) {
    code = kExitError;
    envelope["error"] = {{"status", e.status}, {"message", e.message}};
    if (o.format == "text") {
      std::cout << text.str();
      std::cerr << "error: " << e.message << "\n";
    }
  } catch (const nlohmann::json::exception& e) {
    code = kExitError;
    envelope["error"] = {{"status", "internal"}, {"message", e.what()}};
    if (o.format == "text") std::cerr << "error: " << e.what() << "\n";
  }
  if (o.format == "json") {
    envelope["exit_code"] = code;
    envelope["ok"] = code == kExitOk;
    envelope["report"] = std::move(report);
    std::cout << envelope.dump(2) << "\n";
  } else if (!envelope.contains("error")) {
    std::cout << text.str();
  }
  return code;
}
