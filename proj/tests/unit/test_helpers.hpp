#pragma once

#include <gtest/gtest.h>

#include "bargain/error.hpp"

// Asserts that `stmt` throws bargain::Error with the given code.
#define EXPECT_ERRC(stmt, errc)                                                  \
  do {                                                                           \
    try {                                                                        \
      stmt;                                                                      \
      ADD_FAILURE() << "expected " << ::bargain::to_string(errc) << ", no throw"; \
    } catch (const ::bargain::Error& e_) {                                       \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                   \
    }                                                                            \
  } while (0)
