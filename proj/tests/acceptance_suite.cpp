#include <iostream>

#include "pdcert/acceptance.hpp"

int main()
{
    const auto results = pdcert::run_acceptance();
    pdcert::print_results(std::cout, results);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
