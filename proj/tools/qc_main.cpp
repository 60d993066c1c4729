#include <iostream>

int main() {
    std::cout << "qc: CLI wiring pending\n";
    return 0;
}
