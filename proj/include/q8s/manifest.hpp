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

// Node/Job/Pod manifests: typed decoding with strict field checking,
// canonical serialization, and pod rendering from a job template.
//
// Errors are PositionedError with code() one of "SyntaxError",
// "UnknownKind", "UnknownField" or "InvariantViolation".

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "q8s/types.hpp"
#include "q8s/yaml.hpp"

namespace q8s {

struct ParseOptions {
  /// Reject fields the schema does not know.
  bool strict = true;
};

std::vector<ClusterObject> parse_manifest(std::string_view text, const ParseOptions& opts = {});

/// Decodes one already-parsed YAML document.
ClusterObject decode_object(const yaml::Node& doc, const ParseOptions& opts = {});

/// Decodes the JSON form used by the HTTP API (same field names as YAML).
ClusterObject decode_object(const nlohmann::ordered_json& doc, const ParseOptions& opts = {});

/// Canonical JSON form: apiVersion, kind, metadata, spec, status.
nlohmann::ordered_json to_json(const ClusterObject& obj);

std::string serialize_manifest(const ClusterObject& obj);

PodSpec render_pod_from_template(const JobSpec& job, int attempt);

/// RFC 3339 UTC with millisecond precision.
std::string format_timestamp(Instant t);
std::optional<Instant> parse_timestamp(std::string_view text);

}  // namespace q8s
