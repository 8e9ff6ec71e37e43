#pragma once

#include <stdexcept>
#include <string>

namespace tabletop {

// Machine-readable failure categories. The CLI maps these to exit codes and
// prints them on stderr as `error category=<name> ...`.
enum class ErrorCategory {
  InapplicableDelta,
  InvariantViolation,
  NodeSetMismatch,
  UnknownNode,
  UnsettledWorld,
  Unsolvable,
  GoalConflict,
  CyclicOrdering,
  InsufficientData,
  NoModelForRelation,
  MissingBox,
  MissingBackgroundPlate,
  EmptyLabelSubset,
  DegenerateBox,
  MaskMismatch,
  ScenarioInvalid,
  PlacementInfeasible,
  CorruptManifest,
  MissingAsset,
  MissingArtifacts,
  BufferNotFull,
  UnreachableTarget,
  IoError,
  Usage,
};

const char* to_string(ErrorCategory cat);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& message)
      : std::runtime_error(std::string(to_string(cat)) + ": " + message), cat_(cat) {}

  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

}  // namespace tabletop
