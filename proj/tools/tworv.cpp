#include <string>
#include <vector>

#include "tworv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tworv::cli::run(args);
}
