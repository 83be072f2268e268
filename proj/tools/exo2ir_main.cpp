// CLI front door; subcommands filled in as the library lands.
#include <cstdio>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::puts("exo2ir: under construction");
  return 1;
}
