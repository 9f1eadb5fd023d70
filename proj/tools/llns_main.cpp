#include <cstdio>

int main() {
    std::puts("llns: CLI wired up later in the build");
    return 0;
}
