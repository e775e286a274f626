#pragma once

#include <stdexcept>
#include <string>

namespace gspace {

// Shape / dimension mismatch between an architecture and its inputs.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Class label outside [0, K).
struct LabelError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct EmptyBatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Path enumeration would exceed the configured cap.
struct EnumerationLimitError : std::length_error {
    using std::length_error::length_error;
};

// A G-space step would drive a basis value (or weight) exactly to zero.
struct StepRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (IDX, CSV, checkpoint, config).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gspace
