#include "seqlab/mindl/roles.h"

#include "seqlab/core/error.h"
#include "seqlab/mining/subsequence.h"

namespace seqlab {

std::string ToString(EventRole role) {
  switch (role) {
    case EventRole::kCore:
      return "core";
    case EventRole::kFocus:
      return "focus";
    case EventRole::kContext:
      return "context";
  }
  return "context";
}

std::vector<EventRole> AssignRoles(const SymbolString &member,
                                   const Cluster &cluster) {
  const SymbolString &rep = cluster.representative;
  auto seed_match = FindLeftmostMatch(cluster.seed_template, rep);
  if (!seed_match) {
    throw InvalidArgument("representative '" + rep +
                          "' does not contain the seed template");
  }
  std::vector<bool> is_core(rep.size(), false);
  for (size_t p : *seed_match) is_core[p] = true;

  std::vector<EventRole> roles(member.size(), EventRole::kContext);
  for (const AlignedPair &pair : EditDistance(rep, member).alignment) {
    if (pair.kind != AlignedPair::Kind::kMatch) continue;
    roles[pair.target] =
        is_core[pair.source] ? EventRole::kCore : EventRole::kFocus;
  }
  return roles;
}

std::vector<EventRole> AssignRoles(const EventSequence &member,
                                   const Cluster &cluster) {
  return AssignRoles(ToSymbolString(member), cluster);
}

}  // namespace seqlab
