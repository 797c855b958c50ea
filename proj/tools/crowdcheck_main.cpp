#include "crowdcheck/cli.hpp"

#include <iostream>

int main(int argc, char** argv, char** envp) {
    return crowdcheck::cli::main(argc, argv, envp, std::cout, std::cerr);
}
