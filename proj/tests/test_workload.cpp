#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bmc/error.hpp"
#include "bmc/workload.hpp"

namespace bmc {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bmc_workload_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

TEST(Workload, CellCountAndContains) {
  const RangeQuery q{GridPoint{0, 2}, GridPoint{4, 3}};
  EXPECT_EQ(cell_count(q), Count{10});
  const std::vector<Coord> in{4, 3}, out{5, 3};
  EXPECT_TRUE(q.contains(in));
  EXPECT_FALSE(q.contains(out));
}

TEST(Workload, ValidateRejectsBadQueries) {
  const Grid grid{2, 3};
  EXPECT_THROW((RangeQuery{GridPoint{3, 0}, GridPoint{2, 0}}.validate(grid)), ValidationError);
  EXPECT_THROW((RangeQuery{GridPoint{0, 0}, GridPoint{8, 0}}.validate(grid)), ValidationError);
  EXPECT_THROW((RangeQuery{GridPoint{0}, GridPoint{1}}.validate(grid)), ValidationError);
}

TEST(Workload, DatasetGenerationIsSeeded) {
  const Grid grid{2, 10};
  const auto a = gen_dataset(DataKind::kSkewed, 1000, grid, 5);
  const auto b = gen_dataset(DataKind::kSkewed, 1000, grid, 5);
  const auto c = gen_dataset(DataKind::kSkewed, 1000, grid, 6);
  EXPECT_EQ(a.flat(), b.flat());
  EXPECT_NE(a.flat(), c.flat());
  EXPECT_EQ(a.size(), 1000U);
  for (Coord v : a.flat()) EXPECT_LE(v, grid.max_coord());
}

TEST(Workload, SkewedDataIsClustered) {
  // Five clusters with std side/64 occupy far fewer coarse cells than uniform data.
  const Grid grid{2, 10};
  auto occupied = [&](const Dataset& d) {
    std::vector<bool> cells(32 * 32);
    for (std::size_t i = 0; i < d.size(); ++i) cells[(d.point(i)[0] / 32) * 32 + d.point(i)[1] / 32] = true;
    return std::count(cells.begin(), cells.end(), true);
  };
  const auto uni = gen_dataset(DataKind::kUniform, 20000, grid, 1);
  const auto skew = gen_dataset(DataKind::kSkewed, 20000, grid, 1);
  EXPECT_GT(occupied(uni), 1000);
  EXPECT_LT(occupied(skew), 200);
}

TEST(Workload, QueriesKeepExactExtentInsideGrid) {
  const Grid grid{2, 6};
  // Points hugging the corners force the shift.
  const Dataset corners(grid, {0, 0, 63, 63, 0, 63, 63, 0});
  const auto w = gen_queries(corners, 200, QueryExtent{{10, 3}}, 9);
  ASSERT_EQ(w.size(), 200U);
  for (const auto& q : w.queries) {
    EXPECT_NO_THROW(q.validate(grid));
    EXPECT_EQ(q.hi[0] - q.lo[0] + 1, 10U);
    EXPECT_EQ(q.hi[1] - q.lo[1] + 1, 3U);
  }
}

TEST(Workload, QueriesAreCentredOnData) {
  const Grid grid{2, 8};
  const Dataset one(grid, {100, 50});
  const auto w = gen_queries(one, 3, QueryExtent::cube(2, 9), 1);
  for (const auto& q : w.queries) {
    EXPECT_EQ(q.lo, (GridPoint{96, 46}));
    EXPECT_EQ(q.hi, (GridPoint{104, 54}));
  }
}

TEST(Workload, QueryExtentErrors) {
  const Dataset d(Grid{2, 4}, {1, 1});
  EXPECT_THROW(gen_queries(d, 1, QueryExtent::cube(2, 17), 1), ValidationError);
  EXPECT_THROW(gen_queries(d, 1, QueryExtent::cube(3, 2), 1), ValidationError);
  EXPECT_THROW(gen_queries(Dataset(Grid{2, 4}, {}), 1, QueryExtent::cube(2, 2), 1), ValidationError);
}

TEST(Workload, AspectExtent) {
  const auto e = QueryExtent::aspect(4096, 16, 1);
  EXPECT_EQ(e.edges, (std::vector<Coord>{256, 16}));
  const auto square = QueryExtent::aspect(100, 1, 1);
  EXPECT_EQ(square.edges, (std::vector<Coord>{10, 10}));
  EXPECT_EQ(parse_aspect("16:1"), (std::pair<double, double>{16, 1}));
  EXPECT_THROW(parse_aspect("16x1"), ValidationError);
  EXPECT_THROW(parse_aspect("0:1"), ValidationError);
}

TEST(Workload, PrefixIsNested) {
  const auto d = gen_dataset(DataKind::kUniform, 100, Grid{3, 5}, 2);
  const auto p = d.prefix(10);
  ASSERT_EQ(p.size(), 10U);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_TRUE(std::equal(p.point(i).begin(), p.point(i).end(), d.point(i).begin()));
  }
}

TEST_F(TempDir, LoadPointsQuantisesAndDropsBadRows) {
  const auto path = write("raw.csv",
                          "lon,lat\n"
                          "0,0\n"
                          "1,1\n"
                          "0.5,0.25\n"
                          "abc,0.1\n"
                          "0.3\n"
                          "-2,7\n");
  const auto loaded = load_points(path, Grid{2, 3}, Bounds{{0, 0}, {1, 1}});
  EXPECT_EQ(loaded.dropped_rows, 2U);
  EXPECT_EQ(loaded.dataset.flat(), (std::vector<Coord>{0, 0, 7, 7, 3, 1, 0, 7}));
}

TEST_F(TempDir, LoadPointsErrors) {
  EXPECT_THROW(load_points(dir_ / "missing.csv", Grid{2, 3}, Bounds{{0, 0}, {1, 1}}), IoError);
  const auto path = write("p.csv", "1,2\n");
  EXPECT_THROW(load_points(path, Grid{2, 3}, Bounds{{0, 0}, {1, 0}}), ValidationError);
}

TEST_F(TempDir, PointsRoundTrip) {
  const auto d = gen_dataset(DataKind::kUniform, 50, Grid{3, 6}, 4);
  save_points(dir_ / "d.csv", d);
  const auto back = load_grid_points(dir_ / "d.csv", 6);
  EXPECT_EQ(back.grid(), d.grid());
  EXPECT_EQ(back.flat(), d.flat());
  write("bad.csv", "1,2\n3\n");
  EXPECT_THROW(load_grid_points(dir_ / "bad.csv", 6), IoError);
}

TEST_F(TempDir, WorkloadRoundTrip) {
  const auto d = gen_dataset(DataKind::kSkewed, 100, Grid{2, 8}, 4);
  const auto w = gen_queries(d, 20, QueryExtent::cube(2, 5), 3);
  save_workload(dir_ / "w.json", w);
  const auto back = load_workload(dir_ / "w.json", 8);
  EXPECT_EQ(back.grid, w.grid);
  EXPECT_EQ(back.queries, w.queries);
  // Coordinates beyond a smaller grid are rejected.
  EXPECT_THROW(load_workload(dir_ / "w.json", 2), ValidationError);
  write("junk.json", "{not json");
  EXPECT_THROW(load_workload(dir_ / "junk.json", 8), IoError);
}

TEST(Workload, EmptyWorkloadKeepsGivenDimensionality) {
  const auto w = workload_from_json(nlohmann::json::array(), 4, 3);
  EXPECT_EQ(w.grid, (Grid{3, 4}));
  EXPECT_EQ(w.size(), 0U);
}

}  // namespace
}  // namespace bmc
