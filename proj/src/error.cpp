#include "riskcal/error.hpp"

namespace riskcal {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::RangeViolation: return "RangeViolation";
        case ErrorKind::DuplicateKey: return "DuplicateKey";
        case ErrorKind::InconsistentProfile: return "InconsistentProfile";
        case ErrorKind::UnknownRisk: return "UnknownRisk";
        case ErrorKind::UnknownItem: return "UnknownItem";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::Io: return "Io";
        case ErrorKind::ConstantSeries: return "ConstantSeries";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::SingleGroup: return "SingleGroup";
        case ErrorKind::EmptyStratum: return "EmptyStratum";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::TooFewRows: return "TooFewRows";
        case ErrorKind::MissingPredictor: return "MissingPredictor";
        case ErrorKind::ConstantItem: return "ConstantItem";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::UndefinedKMO: return "UndefinedKMO";
        case ErrorKind::NonPositiveDeterminant: return "NonPositiveDeterminant";
        case ErrorKind::SampleTooSmall: return "SampleTooSmall";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingleFactor: return "SingleFactor";
        case ErrorKind::IllConditionedTarget: return "IllConditionedTarget";
        case ErrorKind::ConstantTotal: return "ConstantTotal";
        case ErrorKind::TooFewItems: return "TooFewItems";
        case ErrorKind::DegenerateStratum: return "DegenerateStratum";
        case ErrorKind::MissingUpstreamModel: return "MissingUpstreamModel";
        case ErrorKind::EmptyHoldout: return "EmptyHoldout";
        case ErrorKind::SizeExceedsStratum: return "SizeExceedsStratum";
        case ErrorKind::SuitabilityGateFailed: return "SuitabilityGateFailed";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedRow:
        case ErrorKind::RangeViolation:
        case ErrorKind::DuplicateKey:
        case ErrorKind::InconsistentProfile:
        case ErrorKind::UnknownRisk:
        case ErrorKind::UnknownItem:
        case ErrorKind::InvalidArgument:
        case ErrorKind::EmptyDataset:
            return 2;
        case ErrorKind::Io:
            return 3;
        default:
            return 4;
    }
}

void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace riskcal
