#ifndef SEQLAB_MINDL_ROLES_H_
#define SEQLAB_MINDL_ROLES_H_

#include <string>
#include <vector>

#include "seqlab/core/dataset.h"
#include "seqlab/mindl/clusterer.h"

namespace seqlab {

// core: aligned to a seed-template event of the representative.
// focus: aligned to a representative event outside the seed template.
// context: everything else.
enum class EventRole { kCore, kFocus, kContext };

std::string ToString(EventRole role);

// One role per member event. The seed template is placed on the
// representative by its leftmost embedding; member events inherit the role
// of the representative event they match exactly under the optimal
// alignment. Replaced and inserted events are context.
std::vector<EventRole> AssignRoles(const SymbolString &member,
                                   const Cluster &cluster);
std::vector<EventRole> AssignRoles(const EventSequence &member,
                                   const Cluster &cluster);

}  // namespace seqlab

#endif  // SEQLAB_MINDL_ROLES_H_
