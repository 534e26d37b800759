#include "nlem/cli.hpp"

int main(int argc, char** argv) {
    return nlem::cli::run(argc, argv);
}
