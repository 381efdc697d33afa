#include "repeater/cli.hpp"

int main(int argc, char** argv) {
    return repeater::cli::run(argc, argv);
}
