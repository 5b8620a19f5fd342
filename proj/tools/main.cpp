#include <string>
#include <vector>

#include "uqp/cli.hpp"

int main(int argc, char** argv) {
    return uqp::run(std::vector<std::string>(argv + 1, argv + argc));
}
