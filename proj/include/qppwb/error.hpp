#pragma once

#include <stdexcept>
#include <string>

namespace qppwb {

// Raised for bad input data: malformed files, duplicate ids, query/qrels
// mismatches, invalid configuration.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qppwb
