#include "commands.hpp"

int main(int argc, char** argv) {
    return iacvlab::cli::run(argc, argv);
}
