#include <cstdio>
int main() { std::puts("spinlab (cli pending)"); return 0; }
