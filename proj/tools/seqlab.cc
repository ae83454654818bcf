#include <iostream>

#include "seqlab/service/cli.h"

int main(int argc, char **argv) {
  return seqlab::RunCli(argc, argv, std::cout, std::cerr);
}
