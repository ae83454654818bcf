#include "seqlab/core/error.h"

#include <sstream>

namespace seqlab {

std::string Issue::ToString() const {
  std::ostringstream os;
  if (!file.empty()) {
    os << file;
    if (line > 0) os << ":" << line;
    os << ": ";
  }
  if (!record.empty()) os << "record '" << record << "': ";
  os << message;
  return os.str();
}

namespace {

std::string Summarize(const std::vector<Issue> &issues) {
  std::ostringstream os;
  os << issues.size() << " validation issue(s)";
  for (const Issue &issue : issues) os << "\n  " << issue.ToString();
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(Summarize(issues)), issues_(std::move(issues)) {}

}  // namespace seqlab
