#include <cstdio>

int main() {
  std::puts("kickcast: CLI under construction");
  return 1;
}
