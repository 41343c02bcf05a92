#pragma once

#include <stdexcept>

// Internal invariant checks, compiled in when RELBOOST_INVARIANT_CHECKS is on.
#ifdef RELBOOST_CHECKS
#define RELBOOST_CHECK(cond, message)                                               \
  do {                                                                              \
    if (!(cond)) throw std::logic_error(std::string("invariant violated: ") + (message)); \
  } while (0)
#else
#define RELBOOST_CHECK(cond, message) \
  do {                                \
  } while (0)
#endif
