// Acceptance runner: executes every verification criterion at its stated
// scale and prints one PASS/FAIL line per criterion. Exit 0 iff all pass.

#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

#include "peelab/verify.hpp"

int main(int argc, char** argv) {
    peelab::VerifyOptions opt;
    opt.log = &std::cout;
    std::string suite = "all";
    for (int i = 1; i < argc - 1; ++i)
        if (std::strcmp(argv[i], "--suite") == 0) suite = argv[i + 1];
    if (suite == "exact") opt.statistical = false;
    if (suite == "statistical") opt.exact = false;

    const auto crits = peelab::run_verify(opt);
    bool ok = true;
    int ran = 0;
    for (const auto& c : crits) {
        if (!c.ran) continue;
        ++ran;
        ok = ok && c.pass;
    }
    std::printf("%d criteria ran, %s\n", ran, ok ? "all passed" : "FAILURES present");
    return ok ? 0 : 1;
}
