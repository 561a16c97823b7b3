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

#include "vdc/error.hpp"

#include <array>
#include <utility>

namespace vdc {
namespace {

constexpr std::array kNames = {
    std::pair{ErrorKind::InvalidSchema, "InvalidSchema"},
    std::pair{ErrorKind::SchemaTemplateMismatch, "SchemaTemplateMismatch"},
    std::pair{ErrorKind::EmptyBindings, "EmptyBindings"},
    std::pair{ErrorKind::UnvalidatedRecipe, "UnvalidatedRecipe"},
    std::pair{ErrorKind::IncompleteBindings, "IncompleteBindings"},
    std::pair{ErrorKind::DomainViolation, "DomainViolation"},
    std::pair{ErrorKind::ZeroPartitions, "ZeroPartitions"},
    std::pair{ErrorKind::InputMismatch, "InputMismatch"},
    std::pair{ErrorKind::BadPlaceholder, "BadPlaceholder"},
    std::pair{ErrorKind::UnterminatedPlaceholder, "UnterminatedPlaceholder"},
    std::pair{ErrorKind::UnboundPlaceholder, "UnboundPlaceholder"},
    std::pair{ErrorKind::UnencodableValue, "UnencodableValue"},
    std::pair{ErrorKind::NonReproParam, "NonReproParam"},
    std::pair{ErrorKind::SeedOverflow, "SeedOverflow"},
    std::pair{ErrorKind::MissingEventsParam, "MissingEventsParam"},
    std::pair{ErrorKind::BadRequest, "BadRequest"},
    std::pair{ErrorKind::InvalidConfig, "InvalidConfig"},
    std::pair{ErrorKind::UnknownReference, "UnknownReference"},
    std::pair{ErrorKind::UnknownTransformation, "UnknownTransformation"},
    std::pair{ErrorKind::UnknownRecipe, "UnknownRecipe"},
    std::pair{ErrorKind::UnknownDataset, "UnknownDataset"},
    std::pair{ErrorKind::UnknownDerivation, "UnknownDerivation"},
    std::pair{ErrorKind::UnknownObject, "UnknownObject"},
    std::pair{ErrorKind::UnknownSite, "UnknownSite"},
    std::pair{ErrorKind::DuplicateVersion, "DuplicateVersion"},
    std::pair{ErrorKind::DuplicateName, "DuplicateName"},
    std::pair{ErrorKind::DuplicateReplica, "DuplicateReplica"},
    std::pair{ErrorKind::CompleteWithoutClaim, "CompleteWithoutClaim"},
    std::pair{ErrorKind::NotClaimant, "NotClaimant"},
    std::pair{ErrorKind::StaleClaim, "StaleClaim"},
    std::pair{ErrorKind::NotFailed, "NotFailed"},
    std::pair{ErrorKind::CycleDetected, "CycleDetected"},
    std::pair{ErrorKind::CorruptRecord, "CorruptRecord"},
    std::pair{ErrorKind::JournalCorrupt, "JournalCorrupt"},
    std::pair{ErrorKind::IoError, "IoError"},
    std::pair{ErrorKind::BindFailure, "BindFailure"},
    std::pair{ErrorKind::Internal, "Internal"},
    std::pair{ErrorKind::ServerUnreachable, "ServerUnreachable"},
};

}  // namespace

std::string_view to_string(ErrorKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "Internal";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSchema:
    case ErrorKind::SchemaTemplateMismatch:
    case ErrorKind::EmptyBindings:
    case ErrorKind::UnvalidatedRecipe:
    case ErrorKind::IncompleteBindings:
    case ErrorKind::DomainViolation:
    case ErrorKind::ZeroPartitions:
    case ErrorKind::InputMismatch:
    case ErrorKind::BadPlaceholder:
    case ErrorKind::UnterminatedPlaceholder:
    case ErrorKind::UnboundPlaceholder:
    case ErrorKind::UnencodableValue:
    case ErrorKind::NonReproParam:
    case ErrorKind::SeedOverflow:
    case ErrorKind::MissingEventsParam:
    case ErrorKind::BadRequest:
    case ErrorKind::InvalidConfig:
      return ErrorCategory::Validation;
    case ErrorKind::UnknownReference:
    case ErrorKind::UnknownTransformation:
    case ErrorKind::UnknownRecipe:
    case ErrorKind::UnknownDataset:
    case ErrorKind::UnknownDerivation:
    case ErrorKind::UnknownObject:
    case ErrorKind::UnknownSite:
      return ErrorCategory::NotFound;
    case ErrorKind::DuplicateVersion:
    case ErrorKind::DuplicateName:
    case ErrorKind::DuplicateReplica:
    case ErrorKind::CompleteWithoutClaim:
    case ErrorKind::NotClaimant:
    case ErrorKind::StaleClaim:
    case ErrorKind::NotFailed:
    case ErrorKind::CycleDetected:
      return ErrorCategory::Conflict;
    case ErrorKind::ServerUnreachable:
      return ErrorCategory::Connectivity;
    default:
      return ErrorCategory::Internal;
  }
}

int http_status(ErrorKind kind) {
  switch (category_of(kind)) {
    case ErrorCategory::Validation:
      return 400;
    case ErrorCategory::NotFound:
      return 404;
    case ErrorCategory::Conflict:
      return 409;
    default:
      return 500;
  }
}

}  // namespace vdc
