#include <cstdio>

int main() {
  std::puts("make_fixtures: under construction");
  return 1;
}
