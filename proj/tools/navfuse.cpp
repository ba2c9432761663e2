#include <vector>
#include <string>

#include "navfuse/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return navfuse::cli::run(std::move(args));
}
