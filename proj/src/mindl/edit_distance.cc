#include "seqlab/mindl/edit_distance.h"

#include <algorithm>
#include <string>

#include "seqlab/core/error.h"

namespace seqlab {

size_t EditDistanceCost(std::string_view source, std::string_view target) {
  const size_t m = target.size();
  std::vector<size_t> row(m + 1);
  for (size_t j = 0; j <= m; ++j) row[j] = j;
  for (size_t i = 1; i <= source.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t up = row[j];
      size_t sub = diag + (source[i - 1] == target[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[m];
}

EditResult EditDistance(std::string_view source, std::string_view target) {
  const size_t n = source.size();
  const size_t m = target.size();
  std::vector<size_t> dp((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> size_t & { return dp[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = at(i - 1, j - 1) + (source[i - 1] == target[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditResult result;
  result.cost = at(n, m);
  // Walk back from the end. Ops are emitted right to left, so each op's
  // position is still valid when the script is applied in order.
  size_t i = n;
  size_t j = m;
  constexpr size_t npos = std::string::npos;
  while (i > 0 || j > 0) {
    const size_t here = at(i, j);
    if (i > 0 && j > 0 && source[i - 1] == target[j - 1] &&
        here == at(i - 1, j - 1)) {
      result.alignment.push_back({AlignedPair::Kind::kMatch, i - 1, j - 1});
      --i;
      --j;
    } else if (i > 0 && j > 0 && here == at(i - 1, j - 1) + 1) {
      result.script.ops.push_back(
          {EditOp::Kind::kReplace, i - 1, target[j - 1]});
      result.alignment.push_back({AlignedPair::Kind::kReplace, i - 1, j - 1});
      --i;
      --j;
    } else if (i > 0 && here == at(i - 1, j) + 1) {
      result.script.ops.push_back({EditOp::Kind::kDelete, i - 1, 0});
      result.alignment.push_back({AlignedPair::Kind::kDelete, i - 1, npos});
      --i;
    } else {
      result.script.ops.push_back({EditOp::Kind::kInsert, i, target[j - 1]});
      result.alignment.push_back({AlignedPair::Kind::kInsert, npos, j - 1});
      --j;
    }
  }
  std::reverse(result.alignment.begin(), result.alignment.end());
  return result;
}

std::string ApplyScript(std::string_view source, const EditScript &script) {
  std::string s(source);
  for (const EditOp &op : script.ops) {
    switch (op.kind) {
      case EditOp::Kind::kInsert:
        if (op.position > s.size()) throw InvalidArgument("insert out of range");
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(op.position),
                 op.symbol);
        break;
      case EditOp::Kind::kDelete:
        if (op.position >= s.size()) throw InvalidArgument("delete out of range");
        s.erase(op.position, 1);
        break;
      case EditOp::Kind::kReplace:
        if (op.position >= s.size()) {
          throw InvalidArgument("replace out of range");
        }
        s[op.position] = op.symbol;
        break;
    }
  }
  return s;
}

}  // namespace seqlab
