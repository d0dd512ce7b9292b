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

#pragma once

// A reader and writer for the small YAML subset used by manifests and task
// bundles: block mappings and sequences, plain/single/double-quoted scalars,
// one level of flow collections (`[a, b]`, `{k: v}`), `#` comments and `---`
// document separators. Anchors, aliases, tags, block scalars and directives
// are rejected with a positioned "SyntaxError".

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "q8s/error.hpp"

namespace q8s::yaml {

class Node {
 public:
  enum class Kind { Null, Scalar, Sequence, Mapping };

  Node() = default;

  static Node null(Position pos = {});
  static Node scalar(std::string value, bool quoted = false, Position pos = {});
  static Node sequence(std::vector<Node> items = {}, bool flow = false);
  static Node mapping();

  Kind kind() const noexcept { return kind_; }
  bool is_null() const noexcept { return kind_ == Kind::Null; }
  bool is_scalar() const noexcept { return kind_ == Kind::Scalar; }
  bool is_sequence() const noexcept { return kind_ == Kind::Sequence; }
  bool is_mapping() const noexcept { return kind_ == Kind::Mapping; }

  Position position() const noexcept { return pos_; }
  void set_position(Position pos) noexcept { pos_ = pos; }

  // Scalars.
  const std::string& value() const noexcept { return value_; }
  bool quoted() const noexcept { return quoted_; }

  // Sequences.
  const std::vector<Node>& items() const noexcept { return items_; }
  void push_back(Node item) { items_.push_back(std::move(item)); }
  bool flow() const noexcept { return flow_; }

  // Mappings keep insertion order.
  struct Entry;
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Node* find(std::string_view key) const;
  const Entry* find_entry(std::string_view key) const;
  /// Appends; duplicate keys are the caller's problem (the parser rejects them).
  void set(std::string key, Node value, Position key_pos = {});

 private:
  Kind kind_ = Kind::Null;
  Position pos_;
  std::string value_;
  bool quoted_ = false;
  bool flow_ = false;
  std::vector<Node> items_;
  std::vector<Entry> entries_;
};

struct Node::Entry {
  std::string key;
  Position key_pos;
  Node value;
};

/// Parses a `---`-separated stream. Empty documents are skipped.
std::vector<Node> parse_stream(std::string_view text);

/// Emits one document in block style with two-space indentation.
std::string emit(const Node& doc);

}  // namespace q8s::yaml
