#include <catch2/catch_amalgamated.hpp>

#include "schelling/run.hpp"

using namespace schelling;

TEST_CASE("same-group cliques are fully similar", "[metrics]") {
    Network g(8);
    for (AgentId i = 0; i < 4; ++i) {
        for (AgentId j = i + 1; j < 4; ++j) {
            g.add_edge(i, j);
            g.add_edge(i + 4, j + 4);
        }
    }
    const GroupAssignment groups(8, 0.5);
    const auto rep = similarity_report(g, groups, ModelParams{});
    CHECK(rep.overall == 1.0);
    CHECK(rep.group1 == 1.0);
    CHECK(rep.group2 == 1.0);
    CHECK(rep.happy_count == 8);
    CHECK(rep.isolated == 0);
}

TEST_CASE("isolated agents count as fully similar", "[metrics]") {
    Network g(4);
    g.add_edge(0, 2);
    const GroupAssignment groups(4, 0.5);
    const auto rep = similarity_report(g, groups, ModelParams{});
    CHECK(rep.isolated == 2);
    CHECK(rep.group1 == Catch::Approx(0.5));
    CHECK(rep.group2 == Catch::Approx(0.5));
    CHECK(rep.overall == Catch::Approx(0.5));
}

TEST_CASE("fresh networks sit at the population mix", "[metrics]") {
    ModelParams p;
    const Model m(p, 77);
    const auto rep = similarity_report(m.network(), m.groups(), p);
    CHECK(std::abs(rep.overall - 0.5) < 0.01);
    CHECK(std::abs(rep.group1 - 0.5) < 0.01);
    CHECK(std::abs(rep.group2 - 0.5) < 0.01);
}

TEST_CASE("overall similarity is the count-weighted group mean", "[metrics][property]") {
    for (double s : {0.5, 0.3, 0.15, 0.05}) {
        ModelParams p;
        p.s = s;
        p.t1 = Tolerance::from_hundredths(70);
        p.t2 = Tolerance::from_hundredths(40);
        const auto r = run(p, 5);
        const GroupAssignment groups(p.n, s);
        const double n1 = static_cast<double>(groups.count(Group::one));
        const double n2 = static_cast<double>(groups.count(Group::two));
        INFO("s=" << s);
        CHECK(r.similarity.overall ==
              Catch::Approx((n1 * r.similarity.group1 + n2 * r.similarity.group2) / (n1 + n2)).margin(1e-12));
    }
}

TEST_CASE("a stabilised run leaves everyone happy", "[metrics]") {
    ModelParams p;
    p.t1 = p.t2 = Tolerance::from_hundredths(55);
    const auto r = run(p, 9);
    REQUIRE(r.stabilised);
    CHECK(r.similarity.happy_count == p.n);
}

TEST_CASE("a small tolerant minority stays mixed while the majority clusters", "[metrics]") {
    ModelParams p;
    p.s = 0.15;
    const auto r = run(p, 11);
    REQUIRE(r.stabilised);
    CHECK(std::abs(r.similarity.group1 - 0.51) < 0.03);
    CHECK(std::abs(r.similarity.group2 - 0.97) < 0.03);
}
