// One line per acceptance criterion; exit status 1 if any fails. Pass criterion numbers to run a subset.
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "suites.hpp"

using namespace suites;

namespace {

struct Criterion {
    int id;
    const char* title;
    Result (*run)();
};

Result c1() { return frame_theorem(3, {-1, 1}); }
Result c2() { return oracle_agreement(3, {-1, 1}); }
Result c3() { return ford_agreement(3, {-1, 1}); }
Result c4() { return wtp_exactness(Bounds{3, {-4, 4}, 32}, wtp_commands(), wtp_posts()); }
Result c5() { return local_rules(3, {-1, 1}); }
Result c6() { return reversal(5, 32); }
Result c7() { return psl_suite(4, {0, 0}); }
Result c8() { return data_structures(4); }
Result c9() {
    Result r = round_trip();
    r.add(determinism());
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all = {
        {1, "frame theorem, corpus formulas, fg <= 3", c1},
        {2, "frame model equals naive fixpoint in both worklist orders, fg <= 3", c2},
        {3, "first-order translation agrees pointwise, fg <= 3", c3},
        {4, "wtp exactness for basic commands, fg <= 3, ints -4..4", c4},
        {5, "local rule identities by equivalence and support, fg <= 3", c5},
        {6, "list reversal verifies, fg = 5, fuel 32", c6},
        {7, "separation logic translation and minimum heaps, fg <= 4", c7},
        {8, "list and tree supports are reachability, fg <= 4", c8},
        {9, "round trip on the corpus and deterministic command line", c9},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    bool ok = true;
    for (auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << c.id << ": " << (r.ok() ? "PASS" : "FAIL") << " - " << c.title << " ("
                  << r.checked << " checks";
        if (r.skipped) std::cout << ", " << r.skipped << " skipped";
        std::cout << ", " << r.failures << " failures, " << std::fixed;
        std::cout.precision(1);
        std::cout << secs << " s)\n";
        if (!r.ok()) std::cout << "  first failure: " << r.first << "\n";
        std::cout.flush();
        ok = ok && r.ok();
    }
    return ok ? 0 : 1;
}
