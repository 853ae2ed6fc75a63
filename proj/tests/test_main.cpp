// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
