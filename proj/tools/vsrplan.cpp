#include <cstdio>

int main() {
  std::puts("vsrplan: command line not wired up yet");
  return 1;
}
