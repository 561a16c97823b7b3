// Copyright 2026 The VDC Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vdc {

/// Every failure the catalog, planner and server can report. The names are
/// part of the wire contract: they appear verbatim in error responses.
enum class ErrorKind {
  // validation
  InvalidSchema,
  SchemaTemplateMismatch,
  EmptyBindings,
  UnvalidatedRecipe,
  IncompleteBindings,
  DomainViolation,
  ZeroPartitions,
  InputMismatch,
  BadPlaceholder,
  UnterminatedPlaceholder,
  UnboundPlaceholder,
  UnencodableValue,
  NonReproParam,
  SeedOverflow,
  MissingEventsParam,
  BadRequest,
  InvalidConfig,
  // not found
  UnknownReference,
  UnknownTransformation,
  UnknownRecipe,
  UnknownDataset,
  UnknownDerivation,
  UnknownObject,
  UnknownSite,
  // conflict
  DuplicateVersion,
  DuplicateName,
  DuplicateReplica,
  CompleteWithoutClaim,
  NotClaimant,
  StaleClaim,
  NotFailed,
  CycleDetected,
  // internal
  CorruptRecord,
  JournalCorrupt,
  IoError,
  BindFailure,
  Internal,
  // client side
  ServerUnreachable,
};

enum class ErrorCategory { Validation, NotFound, Conflict, Internal, Connectivity };

std::string_view to_string(ErrorKind kind);
std::optional<ErrorKind> error_kind_from_string(std::string_view name);
ErrorCategory category_of(ErrorKind kind);

/// HTTP status for an error: validation 400, not-found 404, conflict 409,
/// everything else 500.
int http_status(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace vdc
