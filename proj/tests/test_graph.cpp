#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dppgd/graph.hpp"
#include "dppgd/rng.hpp"

using namespace dppgd;

TEST_CASE("strong connectivity detection") {
  DirectedGraph cycle{3, {{0, 1}, {1, 2}, {2, 0}}};
  CHECK(is_strongly_connected(cycle));

  DirectedGraph path{3, {{0, 1}, {1, 2}}};  // no way back
  CHECK_FALSE(is_strongly_connected(path));

  DirectedGraph single{1, {}};
  CHECK(is_strongly_connected(single));

  DirectedGraph isolated{2, {}};
  CHECK_FALSE(is_strongly_connected(isolated));

  CHECK(is_strongly_connected(complete_graph(4)));
}

TEST_CASE("neighbor queries are self-inclusive and sorted") {
  DirectedGraph cycle{3, {{0, 1}, {1, 2}, {2, 0}}};
  cycle.normalize();
  CHECK(cycle.in_neighbors(0) == std::vector<int>{0, 2});
  CHECK(cycle.out_neighbors(0) == std::vector<int>{0, 1});
  CHECK(cycle.in_neighbors(1) == std::vector<int>{0, 1});
}

TEST_CASE("generators produce the expected edge sets") {
  const DirectedGraph c5 = cycle_graph(5);
  CHECK(c5.node_count == 5);
  CHECK(is_strongly_connected(c5));
  // directed ring: i -> (i+1) mod 5, no duplicate self loops stored
  CHECK(c5.has_edge(0, 1));
  CHECK(c5.has_edge(4, 0));
  CHECK_FALSE(c5.has_edge(1, 0));

  const DirectedGraph k4 = complete_graph(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(k4.has_edge(i, j));
}

TEST_CASE("ten-node benchmark graph shape") {
  const DirectedGraph g = fig1_graph();
  CHECK(g.node_count == 10);
  CHECK(is_strongly_connected(g));
  // ring
  for (int i = 0; i < 10; ++i) CHECK(g.has_edge(i, (i + 1) % 10));
  // chords
  CHECK(g.has_edge(1, 5));
  CHECK(g.has_edge(4, 8));
  CHECK(g.has_edge(7, 2));
  // directionality: reverse chords absent
  CHECK_FALSE(g.has_edge(5, 1));
  // asymmetric degrees exist (what makes the weights non-doubly-stochastic)
  CHECK(g.in_neighbors(5).size() != g.in_neighbors(6).size());
}

TEST_CASE("random strongly connected generator is valid and deterministic") {
  RngStream rng_a(99), rng_b(99);
  const DirectedGraph a = random_strongly_connected(8, 0.3, rng_a);
  const DirectedGraph b = random_strongly_connected(8, 0.3, rng_b);
  CHECK(is_strongly_connected(a));
  CHECK(a.edges == b.edges);

  RngStream rng_c(99);
  CHECK_THROWS_AS(random_strongly_connected(3, 0.0, rng_c, 5),
                  NotStronglyConnected);
}

TEST_CASE("edge list text round trip with 1-based indices") {
  const std::string text = "3\n1 2\n2 3\n3 1\n";
  const DirectedGraph g = parse_edge_list(text);
  CHECK(g.node_count == 3);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 0));
  const DirectedGraph again = parse_edge_list(format_edge_list(g));
  CHECK(again.edges == g.edges);
  CHECK(again.node_count == g.node_count);
}

TEST_CASE("edge list parser skips comments and rejects bad input") {
  const DirectedGraph g =
      parse_edge_list("# a comment\n2\n\n1 2\n# another\n2 1\n");
  CHECK(g.node_count == 2);
  CHECK(g.edges.size() == 2);

  CHECK_THROWS_AS(parse_edge_list(""), GraphError);
  CHECK_THROWS_AS(parse_edge_list("2\n1 3\n"), GraphError);   // out of range
  CHECK_THROWS_AS(parse_edge_list("2\n0 1\n"), GraphError);   // 1-based
  CHECK_THROWS_AS(parse_edge_list("2\nx y\n"), GraphError);   // garbage
  CHECK_THROWS_AS(parse_edge_list("2\n1\n"), GraphError);     // half an edge
}

TEST_CASE("edge list file round trip") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "dppgd_test_graph.txt";
  const DirectedGraph g = fig1_graph();
  save_edge_list(g, p.string());
  const DirectedGraph back = load_edge_list(p.string());
  CHECK(back.node_count == g.node_count);
  DirectedGraph sorted_g = g;
  sorted_g.normalize();
  DirectedGraph sorted_back = back;
  sorted_back.normalize();
  CHECK(sorted_back.edges == sorted_g.edges);
  fs::remove(p);
  CHECK_THROWS_AS(load_edge_list((p / "nope").string()), IoError);
}

TEST_CASE("graph validation rejects malformed graphs") {
  DirectedGraph bad{2, {{0, 2}}};
  CHECK_THROWS_AS(bad.validate(), GraphError);
  DirectedGraph neg{0, {}};
  CHECK_THROWS_AS(neg.validate(), GraphError);
}
