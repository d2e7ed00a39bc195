#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "rmtlab/linalg.hpp"

int main(int argc, char** argv) {
  rmt::pin_blas_threads();
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
