#pragma once

#include <stdexcept>
#include <string>

namespace hedg {

// Every failure raised by the library derives from Error so callers (notably
// the CLI) can map the whole family to one diagnostic path.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A label or index that is not a node of the graph in question.
struct UnknownNode : Error {
    using Error::Error;
};

// An exhaustive algorithm was asked to run beyond its documented bound.
struct SizeLimit : Error {
    using Error::Error;
};

// Structurally malformed input (duplicate labels, bad tables, bad files).
struct InvalidInput : Error {
    using Error::Error;
};

}  // namespace hedg
