#include "tabletop/errors.hpp"

namespace tabletop {

const char* to_string(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::InapplicableDelta: return "InapplicableDelta";
    case ErrorCategory::InvariantViolation: return "InvariantViolation";
    case ErrorCategory::NodeSetMismatch: return "NodeSetMismatch";
    case ErrorCategory::UnknownNode: return "UnknownNode";
    case ErrorCategory::UnsettledWorld: return "UnsettledWorld";
    case ErrorCategory::Unsolvable: return "Unsolvable";
    case ErrorCategory::GoalConflict: return "GoalConflict";
    case ErrorCategory::CyclicOrdering: return "CyclicOrdering";
    case ErrorCategory::InsufficientData: return "InsufficientData";
    case ErrorCategory::NoModelForRelation: return "NoModelForRelation";
    case ErrorCategory::MissingBox: return "MissingBox";
    case ErrorCategory::MissingBackgroundPlate: return "MissingBackgroundPlate";
    case ErrorCategory::EmptyLabelSubset: return "EmptyLabelSubset";
    case ErrorCategory::DegenerateBox: return "DegenerateBox";
    case ErrorCategory::MaskMismatch: return "MaskMismatch";
    case ErrorCategory::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCategory::PlacementInfeasible: return "PlacementInfeasible";
    case ErrorCategory::CorruptManifest: return "CorruptManifest";
    case ErrorCategory::MissingAsset: return "MissingAsset";
    case ErrorCategory::MissingArtifacts: return "MissingArtifacts";
    case ErrorCategory::BufferNotFull: return "BufferNotFull";
    case ErrorCategory::UnreachableTarget: return "UnreachableTarget";
    case ErrorCategory::IoError: return "IoError";
    case ErrorCategory::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace tabletop
