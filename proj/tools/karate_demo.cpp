// Walk budgets and community recovery on Zachary's karate club under both
// walk schedules.
//
//   karate_demo [seed]

#include <cstdio>
#include <cstdlib>

#include "degwalk/degwalk.hpp"

int main(int argc, char** argv) {
  using namespace degwalk;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const Graph g = karate_club();

  TrainConfig tc;
  tc.dim = 32;
  tc.window = 5;
  tc.seed = seed;

  const WalkStrategy strategies[] = {DegreeWalks{5}, FixedWalks{40}};
  for (const auto& s : strategies) {
    WalkConfig wc;
    wc.strategy = s;
    wc.walk_length = 10;
    wc.seed = seed;
    const auto corpus = generate_corpus(g, wc);
    const auto emb = train(corpus, tc, g.num_nodes());

    std::size_t same = 0;
    for (NodeId i = 0; i < g.num_nodes(); ++i) same += g.label(most_similar(emb, i).node) == g.label(i);
    const auto cr = recover_communities(emb, g, seed);
    std::printf("%-10s walks=%5zu  nearest-neighbour faction agreement %2zu/34  k-means recovery %2zu/34\n",
                strategy_label(s).c_str(), corpus.size(), same, cr.correct);
  }
  return 0;
}
