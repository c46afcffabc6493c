#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace graphsi;
using namespace testing_support;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("graphsi_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

SIGraphExport sample_export() {
  const Graph g = random_graph(0, 5, 2, 3);
  GraphGame game(random_model(true, 2, 2, 3), g, default_baseline(g));
  const auto result = graphshapiq_exact(game, khop_neighborhoods(g, 2), 3, IndexKind::kSII);
  return make_export(result.si, result.nu_full, result.nu_empty, game.target(), false);
}

}  // namespace

TEST(GraphJson, RoundTrip) {
  const Graph g = random_graph(2, 9, 3, 4);
  const Graph back = parse_graph(graph_to_json(g, GraphMeta{"er", 4, 0.3}));
  EXPECT_EQ(back.edges(), g.edges());
  EXPECT_EQ(back.features(), g.features());
}

TEST(GraphJson, RejectsMalformedInput) {
  EXPECT_THROW(parse_graph("{"), InputError);
  EXPECT_THROW(parse_graph("[]"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [[0, 1]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [[0, 0]], "features": [[1], [2]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [[0, 1], [1, 0]], "features": [[1], [2]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [[0, 2]], "features": [[1], [2]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [[0, -1]], "features": [[1], [2]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [[0, 1, 1]], "features": [[1], [2]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [], "features": [[1], [2, 3]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 2, "edges": [], "features": [[1], ["x"]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 1.5, "edges": [], "features": [[1]]})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 0, "edges": [], "features": []})"), InputError);
  EXPECT_THROW(parse_graph(R"({"n": 99999999999, "edges": [], "features": [[1]]})"), InputError);
  EXPECT_NO_THROW(parse_graph(R"({"n": 1, "edges": [], "features": [[1]], "extra": true})"));
}

TEST(WeightsJson, RoundTripPreservesPredictions) {
  const Graph g = random_graph(1, 7, 2, 5);
  for (int variant = 0; variant < 4; ++variant) {
    const GnnModel model = random_model(variant % 2 == 0, 1 + variant % 3, 2, 5, variant >= 2);
    const GnnModel back = parse_model(model_to_json(model));
    EXPECT_EQ(forward_graph(back, g, g.features()), forward_graph(model, g, g.features()));
    EXPECT_EQ(model_to_json(back), model_to_json(model));
  }
}

TEST(WeightsJson, RejectsMalformedInput) {
  const std::string ok = model_to_json(random_model(false, 2, 2, 1));
  EXPECT_NO_THROW(parse_model(ok));
  auto replaced = [&](const std::string& from, const std::string& to) {
    std::string s = ok;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse_model(replaced("\"relu\"", "\"tanh\"")), InputError);
  EXPECT_THROW(parse_model(replaced("\"gcn\"", "\"gat\"")), InputError);
  EXPECT_THROW(parse_model(replaced("\"sum\"", "\"max\"")), InputError);
  EXPECT_THROW(parse_model(replaced("\"linear\"", "\"deep\"")), InputError);
  EXPECT_THROW(parse_model(replaced("\"bias\": [", "\"bias\": [1.0, ")), DimensionError);
  EXPECT_THROW(parse_model("{\"activation\": \"relu\"}"), InputError);
}

TEST(WeightsJson, DimensionErrorNamesLayer) {
  const std::string text = R"({"activation": "relu", "pooling": "sum",
    "layers": [{"kind": "gcn", "weight": [[1, 2]], "bias": [0, 0]},
               {"kind": "gcn", "weight": [[1], [2], [3]], "bias": [0]}],
    "readout": {"kind": "linear", "weight": [[1]], "bias": [0]}})";
  try {
    parse_model(text);
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 2"), std::string::npos);
  }
}

TEST(BaselineJson, BareArrayOrObject) {
  EXPECT_EQ(parse_baseline("[1, 2.5]"), (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(parse_baseline(R"({"baseline": [0]})"), (std::vector<double>{0.0}));
  EXPECT_THROW(parse_baseline(R"({"b": [0]})"), InputError);
}

TEST(SIGraphExport, RoundTripIsValueIdentical) {
  const auto ex = sample_export();
  const auto back = export_from_json(export_to_json(ex));
  EXPECT_EQ(back, ex);
  EXPECT_EQ(export_to_json(back), export_to_json(ex));
}

TEST(SIGraphExport, NodesHyperedgesAndEfficiency) {
  const auto ex = sample_export();
  EXPECT_EQ(ex.nodes.size(), 5u);
  double total = ex.metadata.nu_empty;
  for (const auto& node : ex.nodes) total += node.value;
  for (const auto& h : ex.hyperedges) {
    EXPECT_GE(h.members.size(), 2u);
    EXPECT_LE(h.members.size(), 3u);
    EXPECT_NE(h.value, 0.0);
    total += h.value;
  }
  EXPECT_NEAR(total, ex.metadata.nu_N, 1e-6);
  EXPECT_EQ(ex.metadata.index, "ksii");
  EXPECT_EQ(ex.metadata.ell, 2u);
  EXPECT_FALSE(ex.metadata.lambda.has_value());
}

TEST(SIGraphExport, PrunesTinyValues) {
  InteractionValues si;
  si.kind = IndexKind::SII;
  si.order = 2;
  si.n_players = 3;
  si.values = {{Coalition{0}, 1e-13}, {Coalition{1}, 0.5}, {Coalition{0, 1}, -3e-13}, {Coalition{1, 2}, 0.25}};
  const auto ex = make_export(si, 0.75, 0.0, 0, false);
  EXPECT_EQ(ex.nodes[0].value, 0.0);
  EXPECT_EQ(ex.nodes[2].value, 0.0);
  ASSERT_EQ(ex.hyperedges.size(), 1u);
  EXPECT_EQ(ex.hyperedges[0].members, (std::vector<std::size_t>{1, 2}));
  EXPECT_NE(export_to_json(ex).find("\"value\": 0.25"), std::string::npos);
}

TEST(SIGraphExport, SeventeenDigitNumbers) {
  InteractionValues si;
  si.kind = IndexKind::SV;
  si.order = 1;
  si.n_players = 1;
  si.values = {{Coalition{0}, 0.1}};
  const auto json = export_to_json(make_export(si, 0.1, 0.0, 0, false));
  EXPECT_NE(json.find("0.10000000000000001"), std::string::npos);
}

TEST(SIGraphExport, DotRendering) {
  SIGraphExport ex;
  ex.nodes = {{0, 1.0}, {1, -0.5}, {2, 0.0}};
  ex.hyperedges = {{{0, 1}, 0.4}, {{0, 1, 2}, -0.2}};
  const std::string dot = export_to_dot(ex);
  EXPECT_EQ(dot.rfind("graph SIGraph {", 0), 0u);
  EXPECT_NE(dot.find("n0 [label=\"0\\n+1\", fillcolor=\"#d6604d\"]"), std::string::npos) << dot;
  EXPECT_NE(dot.find("fillcolor=\"#4393c3\""), std::string::npos);
  EXPECT_NE(dot.find("n0 -- n1 [penwidth=5.000"), std::string::npos);
  EXPECT_NE(dot.find("h0 [shape=diamond"), std::string::npos);
  EXPECT_NE(dot.find("h0 -- n2"), std::string::npos);
}

TEST(Files, AtomicWriteAndReadBack) {
  const auto dir = scratch_dir();
  const std::string path = (dir / "out.json").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(read_file((dir / "missing.json").string()), IoError);
  EXPECT_THROW(write_file_atomic((dir / "no" / "such" / "dir.json").string(), "x"), IoError);
  fs::remove_all(dir);
}
