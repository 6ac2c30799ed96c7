#include "mgdm/harness.hpp"

int main(int argc, char** argv) {
  return mgdm::harness::cli_entry(argc, argv);
}
