// SPDX-License-Identifier: Apache-2.0
#include "fracpme/cli.hpp"

int main(int argc, char** argv) { return fracpme::cli_main(argc, argv); }
