#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace valtree {

enum class ErrorCode {
  schema,
  parse,
  domain,
  config,
  io,
  insufficient_data,
  degenerate_response,
  degenerate_category,
  within_collinearity,
  degenerate_fold,
  cardinality,
  composition,
  model_format,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (notably the CLI) can map it to an exit status without string
// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace valtree
