#include "rlr/error.hpp"

namespace rlr {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::NotSquare: return "NotSquare";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPsd: return "NotPsd";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptySample: return "EmptySample";
    case Errc::SampleCountMismatch: return "SampleCountMismatch";
    case Errc::NonPositiveRadius: return "NonPositiveRadius";
    case Errc::NonPositiveEta: return "NonPositiveEta";
    case Errc::NonPositiveTau: return "NonPositiveTau";
    case Errc::DitherLengthMismatch: return "DitherLengthMismatch";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::NoRoot: return "NoRoot";
    case Errc::BadNu: return "BadNu";
    case Errc::BadRank: return "BadRank";
    case Errc::DimTooSmall: return "DimTooSmall";
    case Errc::IoError: return "IoError";
    case Errc::BadShape: return "BadShape";
    case Errc::NonBinaryEntry: return "NonBinaryEntry";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::NonPositiveError: return "NonPositiveError";
    case Errc::EmptyRecords: return "EmptyRecords";
    case Errc::SpecError: return "SpecError";
    }
    return "Unknown";
}

} // namespace rlr
