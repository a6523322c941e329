// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "abcas/cli.hpp"

int main(int argc, char** argv) { return abcas::cli::run_cli(argc, argv, std::cout, std::cerr); }
