#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "log.hpp"

int main(int argc, char** argv) {
  gestid::set_warning_sink({});
  doctest::Context context(argc, argv);
  return context.run();
}
