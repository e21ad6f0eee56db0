#pragma once

#include <doctest.h>

#include <functional>

#include "gqads/errors.hpp"

namespace testing {

// Code of the gqads::Error thrown by f; fails the test if nothing is thrown.
inline gqads::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const gqads::Error& e) {
    return e.code();
  }
  FAIL("expected a gqads::Error");
  return gqads::ErrorCode::IOError;
}

}  // namespace testing
