// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "helm/cli.hpp"

int main(int argc, char** argv) { return helm::run_cli(argc, argv, std::cout, std::cerr); }
