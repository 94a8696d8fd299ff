#include "sact/cli.hpp"

int main(int argc, char** argv) {
  return sact::cli::run_cli(argc, argv);
}
