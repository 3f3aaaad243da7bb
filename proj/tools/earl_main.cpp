#include <string>
#include <vector>

#include "earl/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return earl::cli_main(args);
}
