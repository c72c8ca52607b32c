#include <doctest.h>

TEST_SUITE("covariance") {}
