#pragma once

#include <stdexcept>

namespace hoyer {

// Shapes disagree, or a shape is too small for the requested operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A value is outside the domain of an operation (non-finite entry,
// non-positive second moment, negative variance, ...).
class ValueError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A caller-supplied window or index range does not fit the data.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A file exists but its contents are malformed.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The file system refused a read or write.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hoyer
