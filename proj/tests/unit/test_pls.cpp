#include <doctest.h>

TEST_SUITE("pls") {}
