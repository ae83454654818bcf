#ifndef SEQLAB_SERVICE_CLI_H_
#define SEQLAB_SERVICE_CLI_H_

#include <iosfwd>

namespace seqlab {

// Entry point of the seqlab tool. Returns the process exit code: 0 on
// success, 1 when an operation fails (diagnostics on err), 2 for usage
// errors such as an unknown subcommand or flag.
int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

}  // namespace seqlab

#endif  // SEQLAB_SERVICE_CLI_H_
