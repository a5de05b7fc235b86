#include <string>
#include <vector>

#include "ovo/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ovo::run_cli(args);
}
