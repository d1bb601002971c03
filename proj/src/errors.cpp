#include "dispcancel/errors.hpp"

namespace dispcancel {
namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.path + ": " + issue.message;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string path, std::string message)
    : ValidationError(std::vector<Issue>{{std::move(path), std::move(message)}}) {}

}  // namespace dispcancel
