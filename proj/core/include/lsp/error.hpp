#pragma once

#include <stdexcept>

namespace lsp {

/// Bad input data: malformed records, vocabulary overflow, duplicate ids.
class ingest_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Corrupt, truncated or incompatible binary file.
class format_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace lsp
