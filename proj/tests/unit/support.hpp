#pragma once

#include <doctest.h>

#include "liees/error.hpp"

// Runs expr and checks that it throws liees::Error of the given kind.
#define CHECK_ERROR_KIND(expr, k)                                   \
  do {                                                              \
    bool thrown_ = false;                                           \
    try {                                                           \
      (void)(expr);                                                 \
    } catch (const liees::Error& e_) {                              \
      thrown_ = true;                                               \
      CHECK_MESSAGE(e_.kind() == (k), liees::to_string(e_.kind())); \
    }                                                               \
    CHECK_MESSAGE(thrown_, "expected an exception");                \
  } while (false)
