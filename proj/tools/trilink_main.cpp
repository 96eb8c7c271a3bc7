#include <string>
#include <vector>

#include "trilink/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return trilink::cli::run_cli(std::move(args));
}
