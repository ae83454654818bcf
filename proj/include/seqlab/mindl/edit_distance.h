#ifndef SEQLAB_MINDL_EDIT_DISTANCE_H_
#define SEQLAB_MINDL_EDIT_DISTANCE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace seqlab {

// One edit on a working string. Positions refer to the string as it is when
// the op is applied.
struct EditOp {
  enum class Kind { kInsert, kDelete, kReplace };
  Kind kind = Kind::kInsert;
  size_t position = 0;
  char symbol = 0;  // unused for kDelete

  bool operator==(const EditOp &) const = default;
};

// Ops transforming a source string into a target string when applied in
// order. cost() is the number of ops.
struct EditScript {
  std::vector<EditOp> ops;

  size_t cost() const { return ops.size(); }
  bool operator==(const EditScript &) const = default;
};

// One column of an optimal alignment. source/target are npos when the
// column is an insertion/deletion respectively.
struct AlignedPair {
  enum class Kind { kMatch, kReplace, kDelete, kInsert };
  Kind kind;
  size_t source;
  size_t target;
};

struct EditResult {
  size_t cost = 0;
  EditScript script;
  std::vector<AlignedPair> alignment;  // left to right
};

// Unit-cost Levenshtein distance only.
size_t EditDistanceCost(std::string_view source, std::string_view target);

// Distance plus one optimal script from source to target. The backtrace
// prefers match, then replace, then delete, then insert.
EditResult EditDistance(std::string_view source, std::string_view target);

// Applies a script. Throws InvalidArgument when an op is out of range.
std::string ApplyScript(std::string_view source, const EditScript &script);

}  // namespace seqlab

#endif  // SEQLAB_MINDL_EDIT_DISTANCE_H_
