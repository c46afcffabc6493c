// Writes the brute-force Möbius interactions of a small instance as an
// SI-Graph JSON file (index "mi"), for comparison with `graphsi explain`.
#include <iostream>

#include "graphsi/graphsi.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: make_fixture GRAPH WEIGHTS OUT\n";
    return 1;
  }
  try {
    auto graph = graphsi::parse_graph(graphsi::read_file(argv[1]));
    auto model = graphsi::parse_model(graphsi::read_file(argv[2]));
    const std::size_t ell = model.num_layers();
    auto baseline = graphsi::default_baseline(graph);
    graphsi::GraphGame game(std::move(model), std::move(graph), std::move(baseline), {false, 0, 1});
    auto mi = graphsi::brute_force_mi(game);
    mi.ell = ell;
    const double nu_empty = mi.at(graphsi::Coalition());
    const auto ex = graphsi::make_export(mi, game.grand_value(), nu_empty, game.target(), false);
    graphsi::write_file_atomic(argv[3], graphsi::export_to_json(ex));
  } catch (const std::exception& e) {
    std::cerr << "make_fixture: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
