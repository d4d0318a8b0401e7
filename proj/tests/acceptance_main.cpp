#include <cstdio>

#include "qreset/acceptance.hpp"

int main() {
    qreset::AcceptanceOptions opts;
    const auto results = qreset::run_acceptance(opts);
    const int failures = qreset::report_acceptance(results);
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", results.size());
    return 0;
}
