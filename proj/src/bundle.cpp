// Copyright 2026 The q8s Authors
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

#include "q8s/bundle.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "q8s/error.hpp"
#include "q8s/yaml.hpp"

namespace q8s {

namespace fs = std::filesystem;

const char* const kBellQasm =
    "OPENQASM 2.0;\n"
    "include \"qelib1.inc\";\n"
    "qreg q[2];\n"
    "creg c[2];\n"
    "h q[0];\n"
    "cx q[0],q[1];\n"
    "measure q[0] -> c[0];\n"
    "measure q[1] -> c[1];\n";

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error("InvalidBundle", msg); }

template <typename T>
std::optional<T> to_number(std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) invalid("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void load_task(const yaml::Node& m, const fs::path& dir, TaskBundle& out) {
  if (!m.is_mapping()) invalid("task must be a mapping");
  for (const auto& e : m.entries()) {
    if (e.key != "circuit" && e.key != "shots" && e.key != "seed") {
      invalid("unknown field '" + e.key + "' at line " + std::to_string(e.key_pos.line));
    }
  }
  const yaml::Node* circuit = m.find("circuit");
  if (!circuit || !circuit->is_scalar() || circuit->value().empty()) invalid("task.yaml needs a circuit file");
  if (const yaml::Node* s = m.find("shots")) {
    auto v = to_number<int64_t>(s->value());
    if (!s->is_scalar() || !v || *v < 1) invalid("shots must be a positive integer");
    out.shots = *v;
  }
  if (const yaml::Node* s = m.find("seed")) {
    auto v = to_number<uint64_t>(s->value());
    if (!s->is_scalar() || !v) invalid("seed must be a non-negative integer");
    out.seed = *v;
  }
  fs::path file = dir / circuit->value();
  if (!fs::exists(file)) invalid("circuit file " + circuit->value() + " is missing");
  try {
    out.circuit = parse_qasm(read_file(file));
  } catch (const Error& e) {
    invalid(circuit->value() + ": " + e.what());
  }
}

}  // namespace

ImageRef parse_image_ref(std::string_view image) {
  std::string_view last = image.substr(image.rfind('/') == std::string_view::npos ? 0 : image.rfind('/') + 1);
  size_t colon = last.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == last.size()) {
    throw Error("ImageNotFound", "image '" + std::string(image) + "' is not of the form name:tag");
  }
  ImageRef ref{std::string(last.substr(0, colon)), std::string(last.substr(colon + 1))};
  if (ref.name == "." || ref.name == ".." || ref.tag == "." || ref.tag == ".." ||
      ref.tag.find(':') != std::string::npos) {
    throw Error("ImageNotFound", "image '" + std::string(image) + "' is not a valid reference");
  }
  return ref;
}

TaskBundle resolve_bundle(std::string_view image, const fs::path& registry, const std::vector<std::string>& command) {
  TaskBundle out;
  out.image = parse_image_ref(image);
  const fs::path dir = registry / out.image.name / out.image.tag;
  const fs::path task = dir / "task.yaml";
  if (!fs::exists(task)) {
    throw Error("ImageNotFound", "image " + out.image.name + ":" + out.image.tag + " not found in " + registry.string());
  }
  std::vector<yaml::Node> docs;
  try {
    docs = yaml::parse_stream(read_file(task));
  } catch (const PositionedError& e) {
    invalid(std::string("task.yaml: ") + e.what());
  }
  if (docs.size() != 1 || !docs[0].is_mapping()) invalid("task.yaml must hold one mapping");
  if (const yaml::Node* entries = docs[0].find("entries")) {
    if (docs[0].entries().size() != 1) invalid("task.yaml with entries must have no other fields");
    if (command.empty()) invalid("bundle has several entries; the pod must name one in command");
    const yaml::Node* chosen = entries->find(command[0]);
    if (!chosen) invalid("bundle has no entry '" + command[0] + "'");
    out.entry = command[0];
    load_task(*chosen, dir, out);
  } else {
    load_task(docs[0], dir, out);
  }
  return out;
}

RunOverrides parse_run_args(const std::vector<std::string>& args) {
  RunOverrides out;
  for (size_t i = 0; i < args.size(); ++i) {
    std::string flag = args[i], value;
    if (auto eq = flag.find('='); eq != std::string::npos) {
      value = flag.substr(eq + 1);
      flag.resize(eq);
    } else if (flag == "--shots" || flag == "--seed") {
      if (i + 1 == args.size()) throw Error("InvalidArgs", flag + " needs a value");
      value = args[++i];
    }
    if (flag == "--shots") {
      auto v = to_number<int64_t>(value);
      if (!v || *v < 1) throw Error("InvalidArgs", "--shots must be a positive integer");
      out.shots = v;
    } else if (flag == "--seed") {
      auto v = to_number<uint64_t>(value);
      if (!v) throw Error("InvalidArgs", "--seed must be a non-negative integer");
      out.seed = v;
    } else {
      throw Error("InvalidArgs", "unknown argument " + args[i]);
    }
  }
  return out;
}

void write_bundle(const fs::path& registry, const ImageRef& image, const std::string& qasm, int64_t shots,
                  std::optional<uint64_t> seed, const std::string& circuit_file) {
  const fs::path dir = registry / image.name / image.tag;
  fs::create_directories(dir);
  std::ofstream(dir / circuit_file) << qasm;
  std::ofstream task(dir / "task.yaml");
  task << "circuit: " << circuit_file << "\nshots: " << shots << "\n";
  if (seed) task << "seed: " << *seed << "\n";
}

}  // namespace q8s
