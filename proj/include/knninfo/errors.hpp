#pragma once

#include <stdexcept>
#include <string>

namespace knninfo {

/// Problems with user-supplied files: unreadable paths, parse failures,
/// malformed configs or datasets.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace knninfo
