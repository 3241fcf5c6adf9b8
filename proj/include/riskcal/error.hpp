#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskcal {

// Every failure the toolkit reports carries one of these kinds. The kind
// decides the CLI exit status (see exit_code()).
enum class ErrorKind {
    // input validation
    MalformedRow,
    RangeViolation,
    DuplicateKey,
    InconsistentProfile,
    UnknownRisk,
    UnknownItem,
    InvalidArgument,
    EmptyDataset,
    // i/o
    Io,
    // numeric / analysis
    ConstantSeries,
    LengthMismatch,
    TooFewPoints,
    SingleGroup,
    EmptyStratum,
    RankDeficient,
    TooFewRows,
    MissingPredictor,
    ConstantItem,
    SingularMatrix,
    UndefinedKMO,
    NonPositiveDeterminant,
    SampleTooSmall,
    NoConvergence,
    SingleFactor,
    IllConditionedTarget,
    ConstantTotal,
    TooFewItems,
    DegenerateStratum,
    MissingUpstreamModel,
    EmptyHoldout,
    SizeExceedsStratum,
    SuitabilityGateFailed,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// 2 validation, 3 i/o, 4 numeric.
int exit_code(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace riskcal
