#include <iostream>

int main() {
    std::cout << "agora: placeholder\n";
    return 0;
}
