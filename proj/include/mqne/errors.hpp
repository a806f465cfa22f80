#pragma once

#include <stdexcept>

namespace mqne {

// Library failures derive from Error so the CLI can catch one type at the
// boundary. Precondition violations use std::invalid_argument /
// std::out_of_range directly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedVectorError : Error {
    using Error::Error;
};
struct ResourceLimitError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct SpecMismatchError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct TrainError : Error {
    using Error::Error;
};

} // namespace mqne
