#include "valtree/error.hpp"

namespace valtree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema: return "schema error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::config: return "config error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::insufficient_data: return "insufficient data";
    case ErrorCode::degenerate_response: return "degenerate response";
    case ErrorCode::degenerate_category: return "degenerate category";
    case ErrorCode::within_collinearity: return "within-collinearity";
    case ErrorCode::degenerate_fold: return "degenerate fold";
    case ErrorCode::cardinality: return "cardinality error";
    case ErrorCode::composition: return "composition error";
    case ErrorCode::model_format: return "model format error";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace valtree
