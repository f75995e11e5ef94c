#include "igk/cli.hpp"

int main(int argc, char** argv) {
    return igk::cli_main(argc, argv);
}
