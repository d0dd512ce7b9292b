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

#include "q8s/yaml.hpp"

#include "gtest/gtest.h"

using q8s::PositionedError;
using q8s::yaml::Node;
using q8s::yaml::parse_stream;

TEST(Yaml, nested_block_mapping) {
  auto docs = parse_stream("a:\n  b: 1\n  c:\n    d: x y\n");
  ASSERT_EQ(docs.size(), 1u);
  const Node& a = *docs[0].find("a");
  EXPECT_EQ(a.find("b")->value(), "1");
  EXPECT_EQ(a.find("c")->find("d")->value(), "x y");
}

TEST(Yaml, compact_and_indented_sequences) {
  auto compact = parse_stream("items:\n- name: a\n  v: 1\n- name: b\n");
  auto indented = parse_stream("items:\n  - name: a\n    v: 1\n  - name: b\n");
  for (const auto& docs : {compact, indented}) {
    const Node& items = *docs[0].find("items");
    ASSERT_TRUE(items.is_sequence());
    ASSERT_EQ(items.items().size(), 2u);
    EXPECT_EQ(items.items()[0].find("v")->value(), "1");
    EXPECT_EQ(items.items()[1].find("name")->value(), "b");
  }
}

TEST(Yaml, flow_sequence_and_quotes) {
  auto docs = parse_stream("cmd: [\"./run.sh\", 'a''b', plain]\nq: \"x: y # not a comment\"  # comment\n");
  const Node& cmd = *docs[0].find("cmd");
  ASSERT_EQ(cmd.items().size(), 3u);
  EXPECT_EQ(cmd.items()[0].value(), "./run.sh");
  EXPECT_EQ(cmd.items()[1].value(), "a'b");
  EXPECT_EQ(cmd.items()[2].value(), "plain");
  EXPECT_EQ(docs[0].find("q")->value(), "x: y # not a comment");
}

TEST(Yaml, multi_document_stream) {
  auto docs = parse_stream("---\na: 1\n---\nb: 2\n---\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1].find("b")->value(), "2");
}

TEST(Yaml, positions_are_one_based) {
  try {
    parse_stream("a: 1\nb:\n  c: &anchor 2\n");
    FAIL();
  } catch (const PositionedError& e) {
    EXPECT_EQ(e.code(), "SyntaxError");
    EXPECT_EQ(e.position().line, 3);
    EXPECT_EQ(e.position().column, 6);
  }
}

TEST(Yaml, rejects_unsupported_constructs) {
  for (const char* text : {"a: *ref\n", "a: !tag x\n", "a: |\n  text\n", "a: [[1]]\n", "a: 1\na: 2\n",
                           "a:\n\tb: 1\n", "a: \"open\n", "a: b: c\n", "a: 1\n   b: 2\n", "%YAML 1.2\n"}) {
    EXPECT_THROW(parse_stream(text), PositionedError) << text;
  }
}

TEST(Yaml, emit_reparses_to_same_tree) {
  const char* text =
      "apiVersion: v1\nmetadata:\n  labels:\n    k: \"needs: quote\"\nspec:\n  list:\n  - a: 1\n    b: [\"x\", \"y\"]\n"
      "  - c: {}\n";
  Node doc = parse_stream(text).at(0);
  std::string out = q8s::yaml::emit(doc);
  Node again = parse_stream(out).at(0);
  EXPECT_EQ(q8s::yaml::emit(again), out);
  EXPECT_EQ(again.find("metadata")->find("labels")->find("k")->value(), "needs: quote");
  EXPECT_EQ(again.find("spec")->find("list")->items()[0].find("b")->items()[1].value(), "y");
}
