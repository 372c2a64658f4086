// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "ndiscan/pipeline.hpp"

int main(int argc, char** argv) { return ndi::run_cli(argc, argv, std::cout, std::cerr); }
