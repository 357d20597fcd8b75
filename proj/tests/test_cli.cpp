#include "doctest.h"

#include <json.hpp>

#include "suites.hpp"

using suites::cli;
using suites::corpus;

TEST_CASE("support of the three-node tree") {
    auto r = cli("support " + corpus("tree.fl") + " --model " + corpus("tree3.mdl") + " --nu x=u1");
    CHECK(r.status == 0);
    CHECK(r.out == "{u1, u2, u3}\n");
    auto e = cli("eval " + corpus("tree.fl") + " --model " + corpus("tree3.mdl") + " --nu x=u2 --format jsonl");
    CHECK(e.status == 0);
    CHECK(e.out == "{\"formula\":\"tree(x)\",\"value\":true}\n");
}

TEST_CASE("exit codes") {
    auto parse = cli("eval " + corpus("tree.fl") + " --model " + corpus("tree3.mdl") + " --formula \"tree(x\"");
    CHECK(parse.status == 2);
    CHECK(parse.out.find(":1:") != std::string::npos);
    CHECK(cli("eval").status == 2);
    CHECK(cli("nosuch " + corpus("tree.fl")).status == 2);
    CHECK(cli("eval " + corpus("tree.fl") + " --model " + corpus("tree3.mdl")).status == 2);
    CHECK(cli("eval " + corpus("missing.fl") + " --model " + corpus("tree3.mdl") + " --nu x=u1").status == 2);
    CHECK(cli("verify " + corpus("reversal.flp") + " --fg-size 4").status == 0);
    auto bad = cli("check-triple " + corpus("reversal.flp") + " --program \"x := y.next\" --formula \"x = next(y)\"");
    CHECK(bad.status == 1);
    CHECK(bad.out.find("execution aborts") != std::string::npos);
    auto inval = cli("check-triple " + corpus("reversal.flp") + " --program \"i := i.next\" --formula \"true\" --fg-size 2");
    CHECK(inval.status == 1);
    CHECK(inval.out.find("invalid") != std::string::npos);
    auto loop = cli("check-triple " + corpus("reversal.flp") +
                    " --program \"while i = i do { skip }\" --formula \"true\" --fg-size 2 --fuel 3");
    CHECK(loop.status == 3);
}

TEST_CASE("verify prints one record per obligation") {
    auto r = cli("verify " + corpus("reversal.flp") + " --fg-size 3 --format jsonl");
    REQUIRE(r.status == 0);
    std::istringstream in(r.out);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        for (auto k : {"id", "kind", "provenance", "formula-text", "verdict"}) CHECK(j.contains(k));
        CHECK(j["verdict"] == "valid");
        ++n;
    }
    CHECK(n == 3);
}

TEST_CASE("frame-check reports its threshold and mode") {
    auto small = cli("frame-check " + corpus("tree.fl") + " --fg-size 2");
    CHECK(small.status == 0);
    CHECK(small.out.find("exhaustive up to fg-size 3") != std::string::npos);
    CHECK(small.out.find("fg-size 2 exhaustive") != std::string::npos);
    CHECK(small.out.find(" 0 violations") != std::string::npos);
    auto big = cli("frame-check " + corpus("tree.fl") + " --fg-size 4 --samples 200 --seed 3");
    CHECK(big.status == 0);
    CHECK(big.out.find("fg-size 4 sampled, seed 3") != std::string::npos);
    CHECK(big.out.find("of 200 instances") != std::string::npos);
}

TEST_CASE("run, wtp and the translations") {
    auto run = cli("run " + corpus("reversal.flp") + " --model " + corpus("chain3.mdl") + " --nu i=u1,j=nil,k=nil");
    CHECK(run.status == 0);
    CHECK(run.out == "final (store: i=nil,j=u3,k=nil, H={u1, u2, u3}, U={})\n");
    auto ab = cli("run " + corpus("reversal.flp") + " --model " + corpus("chain3.mdl") +
                  " --nu i=u1,j=nil,k=nil --heap {u2} --program \"k := i.next\"");
    CHECK(ab.status == 1);
    CHECK(ab.out == "abort\n");
    auto w = cli("wtp " + corpus("reversal.flp") + " --program \"i := j\" --formula \"i = j\"");
    CHECK(w.status == 0);
    CHECK(w.out == "j = j\n");
    auto f = cli("translate-ford " + corpus("tree.fl"));
    CHECK(f.status == 0);
    CHECK(f.out.find("Sp_1(x, z) :=") != std::string::npos);
    auto p = cli("translate-psl " + corpus("shapes.slf") + " --formula \"x |-next-> y * y |-next-> z\"");
    CHECK(p.status == 0);
    CHECK(p.out.find("goal next(x) = y && next(y) = z && Sp(next(x) = y) cap Sp(next(y) = z) = emptyset;") !=
          std::string::npos);
    auto m = cli("min-heap " + corpus("shapes.slf") + " --formula \"x |-next-> y\" --nu x=u1,y=u2,z=nil --fg-size 3");
    CHECK(m.status == 0);
    CHECK(m.out == "{u1.next=u2}\n");
}

TEST_CASE("identical flags give identical output") {
    auto r = suites::determinism();
    CHECK_MESSAGE(r.ok(), r.first);
}
