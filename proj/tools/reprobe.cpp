// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ReProbe Authors

#include <iostream>

#include "reprobe/cli/cli.hpp"

int main(int argc, char** argv) { return reprobe::run_cli(argc, argv, std::cout, std::cerr); }
