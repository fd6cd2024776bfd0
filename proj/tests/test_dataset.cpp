#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "latentgraph/dataset.hpp"

using namespace lg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lg_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(path / name);
    out << content;
  }
};

}  // namespace

TEST_CASE("a 3-row fixture ingests with matching labels") {
  TempDir dir;
  dir.write("features.csv", "1.0,2.0\n3.0,4.0\n5.0,6.0\n");
  dir.write("labels.csv", "0\n1\n1\n");
  const Dataset d = ingest(dir.path.string());
  CHECK(d.n_rows() == 3);
  CHECK(d.labels == std::vector<int>{0, 1, 1});
  CHECK(d.n_classes() == 2);
  CHECK(d.features(2, 1) == 6.0);
  CHECK_FALSE(d.graph.has_value());
}

TEST_CASE("edge endpoints out of range fail with the offending line") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n1,1\n");
  dir.write("labels.csv", "0\n1\n0\n");
  dir.write("edges.csv", "0,1,1.0\n0,5,2.0\n");
  CHECK_THROWS_WITH_AS(ingest(dir.path.string()), doctest::Contains("edges.csv:2"),
                       std::runtime_error);
}

TEST_CASE("duplicate symmetric edges with equal weight ingest silently") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n");
  dir.write("labels.csv", "0\n1\n");
  dir.write("edges.csv", "0,1,0.5\n1,0,0.5\n");
  const Dataset d = ingest(dir.path.string());
  REQUIRE(d.graph.has_value());
  CHECK(d.graph->adjacency(0, 1) == 0.5);
  CHECK(d.graph->adjacency(1, 0) == 0.5);
}

TEST_CASE("asymmetric edge lists are symmetrized on load") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n1,1\n");
  dir.write("labels.csv", "0\n1\n0\n");
  dir.write("edges.csv", "0,1,0.5\n1,2,0.25\n");
  const Dataset d = ingest(dir.path.string());
  REQUIRE(d.graph.has_value());
  CHECK(d.graph->adjacency(1, 0) == 0.5);
  CHECK(d.graph->adjacency(2, 1) == 0.25);
}

TEST_CASE("labels and features row counts must agree") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n");
  dir.write("labels.csv", "0\n1\n1\n");
  CHECK_THROWS_AS(ingest(dir.path.string()), std::runtime_error);
}

TEST_CASE("malformed numerics are reported with file and line") {
  TempDir dir;
  dir.write("features.csv", "1,0\nx,1\n");
  dir.write("labels.csv", "0\n1\n");
  CHECK_THROWS_WITH_AS(ingest(dir.path.string()), doctest::Contains("features.csv:2"),
                       std::runtime_error);
}

TEST_CASE("splits ingest into disjoint masks and reject double assignment") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n1,1\n0.5,0.5\n");
  dir.write("labels.csv", "0\n1\n0\n1\n");
  dir.write("splits.csv", "0,train\n1,valid\n2,test\n3,test\n");
  const Dataset d = ingest(dir.path.string());
  REQUIRE(d.split.has_value());
  CHECK(d.split->train == std::vector<int>{0});
  CHECK(d.split->valid == std::vector<int>{1});
  CHECK(d.split->test == std::vector<int>{2, 3});

  dir.write("splits.csv", "0,train\n0,test\n");
  CHECK_THROWS_AS(ingest(dir.path.string()), std::runtime_error);
}

TEST_CASE("layer exports are ordered by index and row-checked") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n");
  dir.write("labels.csv", "0\n1\n");
  fs::create_directories(dir.path / "layers");
  dir.write("layers/1_hidden.csv", "0.5\n0.25\n");
  dir.write("layers/0_input.csv", "1.0\n2.0\n");
  const Dataset d = ingest(dir.path.string());
  REQUIRE(d.layers.size() == 2);
  CHECK(d.layers[0].name == "input");
  CHECK(d.layers[1].name == "hidden");
}

TEST_CASE("items ingest with optional fields") {
  TempDir dir;
  dir.write("features.csv", "1,0\n0,1\n");
  dir.write("labels.csv", "0\n1\n");
  dir.write("items.csv", "0,3,7,45.0,3.0,\n1,,,,,2\n");
  const Dataset d = ingest(dir.path.string());
  REQUIRE(d.items.size() == 2);
  CHECK(d.items[0].sequence_id == 3);
  CHECK(d.items[0].frame_index == 7);
  CHECK(d.items[0].gps.has_value());
  CHECK_FALSE(d.items[0].class_id.has_value());
  CHECK_FALSE(d.items[1].gps.has_value());
  CHECK(d.items[1].class_id == 2);
}

TEST_CASE("ingestion round-trip preserves the normalized form") {
  TempDir source;
  source.write("features.csv", "1,0\n0,1\n1,1\n");
  source.write("labels.csv", "0\n1\n0\n");
  source.write("edges.csv", "1,0,0.5\n1,2,0.25\n");
  const Dataset d = ingest(source.path.string());

  TempDir copy;
  write_dataset(d, copy.path.string());
  const Dataset d2 = ingest(copy.path.string());
  CHECK((d.features - d2.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.labels == d2.labels);
  REQUIRE(d2.graph.has_value());
  CHECK((d.graph->adjacency - d2.graph->adjacency).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config hash is stable and content sensitive") {
  const std::string a = config_hash("{\"task\":\"bench-ucv\"}");
  CHECK(a == config_hash("{\"task\":\"bench-ucv\"}"));
  CHECK(a != config_hash("{\"task\":\"bench-dgs\"}"));
}
