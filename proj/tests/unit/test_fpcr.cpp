#include <doctest.h>

TEST_SUITE("fpcr") {}
