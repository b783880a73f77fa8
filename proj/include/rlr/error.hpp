#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rlr {

enum class Errc {
    NonFinite,
    NotSquare,
    NotSymmetric,
    NotPsd,
    ShapeMismatch,
    EmptySample,
    SampleCountMismatch,
    NonPositiveRadius,
    NonPositiveEta,
    NonPositiveTau,
    DitherLengthMismatch,
    DegenerateData,
    NoRoot,
    BadNu,
    BadRank,
    DimTooSmall,
    IoError,
    BadShape,
    NonBinaryEntry,
    TooFewPoints,
    NonPositiveError,
    EmptyRecords,
    SpecError,
};

std::string_view to_string(Errc code);

/// Exception carrying one of the library error kinds.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace rlr
