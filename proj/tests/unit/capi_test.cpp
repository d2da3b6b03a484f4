#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mgower/mgower.h"

namespace {

const std::string kData = MGOWER_TEST_DATA;

std::string take(char* s) {
  std::string out = s ? s : "";
  mg_string_free(s);
  return out;
}

struct Loaded {
  mg_dataset* p = nullptr;
  ~Loaded() { mg_dataset_free(p); }
};

struct Cfg {
  mg_config* p = nullptr;
  ~Cfg() { mg_config_free(p); }
};

}  // namespace

TEST(CApi, LoadAndShape) {
  Loaded d;
  ASSERT_EQ(mg_dataset_load_file((kData + "/survey.csv").c_str(), (kData + "/survey.schema.json").c_str(), &d.p),
            MG_OK)
      << mg_last_error();
  EXPECT_EQ(mg_dataset_rows(d.p), 12u);
  EXPECT_EQ(mg_dataset_cols(d.p), 5u);  // id column is not a variable
  double v = 0;
  ASSERT_EQ(mg_dataset_cell(d.p, 1, 4, &v), MG_OK);
  EXPECT_TRUE(std::isnan(v));
  EXPECT_EQ(mg_dataset_cell(d.p, 99, 0, &v), MG_ERR_USAGE);
}

TEST(CApi, ErrorCodesAndMessages) {
  Loaded d;
  const char* schema = R"({"sex": {"kind": "nominal", "categories": ["M", "F"]}, "age": {"kind": "numeric"}})";
  EXPECT_EQ(mg_dataset_load("sex,age\nX,1\n", schema, &d.p), MG_ERR_DATA);
  EXPECT_NE(std::string(mg_last_error()).find("unknown category"), std::string::npos);
  EXPECT_EQ(d.p, nullptr);
  EXPECT_EQ(mg_dataset_load("sex,age\n,\n", schema, &d.p), MG_ERR_DATA);
  EXPECT_EQ(mg_dataset_load("sex,age\nM,1\n", "{not json", &d.p), MG_ERR_SCHEMA);
  EXPECT_EQ(mg_dataset_load(nullptr, schema, &d.p), MG_ERR_USAGE);

  Cfg c;
  EXPECT_EQ(mg_config_create("std", "iqr", 0, &c.p), MG_ERR_USAGE);
  ASSERT_EQ(mg_config_create("std", "iqr", 1, &c.p), MG_OK);
  EXPECT_EQ(mg_config_set_k(c.p, 3), MG_ERR_USAGE);
  EXPECT_EQ(mg_config_set_weight(c.p, "age", -1), MG_ERR_USAGE);
  EXPECT_EQ(mg_config_set_stats_source(c.p, "elsewhere"), MG_ERR_USAGE);
}

TEST(CApi, SexAgeMatrixDiagonal) {
  Loaded a, b;
  const std::string schema = kData + "/sex_age.schema.json";
  ASSERT_EQ(mg_dataset_load_file((kData + "/pairs_left.csv").c_str(), schema.c_str(), &a.p), MG_OK);
  ASSERT_EQ(mg_dataset_load_file((kData + "/pairs_right.csv").c_str(), schema.c_str(), &b.p), MG_OK);
  Cfg c;
  ASSERT_EQ(mg_config_create("std", nullptr, 0, &c.p), MG_OK);
  std::vector<double> m(100);
  ASSERT_EQ(mg_distance_matrix(a.p, b.p, c.p, m.data()), MG_OK);
  const double expected[] = {0.0000, 0.1235, 0.2529, 0.3706, 0.5000, 0.5000, 0.6235, 0.7529, 0.8706, 1.0000};
  for (int k = 0; k < 10; ++k) EXPECT_EQ(std::round(m[k * 10 + k] * 1e4) / 1e4, expected[k]);

  char* csv = nullptr;
  ASSERT_EQ(mg_distance_matrix_csv(a.p, b.p, c.p, &csv), MG_OK);
  const auto text = take(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "id,q01,q02,q03,q04,q05,q06,q07,q08,q09,q10");
  EXPECT_NE(text.find("p02,0.000000,0.123529,"), std::string::npos);
}

TEST(CApi, MatchHandle) {
  Loaded a, b;
  const std::string schema = kData + "/sex_age.schema.json";
  ASSERT_EQ(mg_dataset_load_file((kData + "/pairs_left.csv").c_str(), schema.c_str(), &a.p), MG_OK);
  ASSERT_EQ(mg_dataset_load_file((kData + "/pairs_right.csv").c_str(), schema.c_str(), &b.p), MG_OK);
  Cfg c;
  ASSERT_EQ(mg_config_create("std", nullptr, 0, &c.p), MG_OK);
  mg_matches* m = nullptr;
  ASSERT_EQ(mg_match(a.p, b.p, c.p, 2, &m), MG_OK);
  EXPECT_EQ(mg_matches_recipients(m), 10u);
  EXPECT_EQ(mg_matches_per_recipient(m), 2u);
  size_t donor = 99;
  double dist = -1;
  ASSERT_EQ(mg_matches_get(m, 0, 0, &donor, &dist), MG_OK);
  EXPECT_EQ(donor, 0u);
  EXPECT_EQ(dist, 0.0);
  EXPECT_EQ(mg_matches_get(m, 0, 2, &donor, &dist), MG_ERR_USAGE);
  char* csv = nullptr;
  ASSERT_EQ(mg_matches_to_csv(m, &csv), MG_OK);
  const auto text = take(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "recipient_id,rank,donor_id,distance");
  EXPECT_NE(text.find("p01,1,q01,0.000000"), std::string::npos);
  mg_matches_free(m);

  EXPECT_EQ(mg_match(a.p, b.p, c.p, 11, &m), MG_ERR_USAGE);
}

TEST(CApi, ImputeAndDonorMap) {
  Loaded d, done;
  ASSERT_EQ(mg_dataset_load_file((kData + "/survey.csv").c_str(), (kData + "/survey.schema.json").c_str(), &d.p),
            MG_OK);
  Cfg c;
  ASSERT_EQ(mg_config_create("kde1", "iqr", 0, &c.p), MG_OK);
  char* map = nullptr;
  ASSERT_EQ(mg_impute(d.p, "income", c.p, 0, 0, &done.p, &map), MG_OK) << mg_last_error();
  const auto text = take(map);
  EXPECT_EQ(text.substr(0, text.find('\n')), "recipient_id,donor_id,distance");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  for (size_t r = 0; r < mg_dataset_rows(done.p); ++r) {
    double v = 0;
    ASSERT_EQ(mg_dataset_cell(done.p, r, 4, &v), MG_OK);
    EXPECT_FALSE(std::isnan(v));
  }
  Loaded again;
  EXPECT_EQ(mg_impute(done.p, "income", c.p, 0, 0, &again.p, nullptr), MG_ERR_DATA);
}

TEST(CApi, StatsAndDummyReport) {
  Loaded d;
  ASSERT_EQ(mg_dataset_load_file((kData + "/pairs_right.csv").c_str(), (kData + "/sex_age.schema.json").c_str(), &d.p),
            MG_OK);
  char* s = nullptr;
  ASSERT_EQ(mg_stats_json(d.p, &s), MG_OK);
  const auto stats = take(s);
  EXPECT_NE(stats.find("\"R\": 85.0"), std::string::npos);
  EXPECT_NE(stats.find("\"h_kde1\""), std::string::npos);

  EXPECT_EQ(mg_dummy_report_json(d.p, &s), MG_ERR_USAGE);
  Loaded cat;
  ASSERT_EQ(mg_dataset_load_file((kData + "/categorical.csv").c_str(), (kData + "/categorical.schema.json").c_str(),
                                 &cat.p),
            MG_OK);
  ASSERT_EQ(mg_dummy_report_json(cat.p, &s), MG_OK);
  const auto report = take(s);
  EXPECT_NE(report.find("\"n_dummies\": 5"), std::string::npos);
}

TEST(CApi, SimulateSmall) {
  char* out = nullptr;
  ASSERT_EQ(mg_simulate(R"({"n": 60, "reps": 2, "seed": 3})", "no.mod,cond.dist:iqr", nullptr, &out), MG_OK)
      << mg_last_error();
  const auto a = take(out);
  ASSERT_EQ(mg_simulate(R"({"n": 60, "reps": 2, "seed": 3, "workers": 2})", "no.mod,cond.dist:iqr", nullptr, &out),
            MG_OK);
  EXPECT_EQ(a, take(out));
  EXPECT_NE(a.find("\"cond.dist\""), std::string::npos);
  EXPECT_EQ(mg_simulate(R"({"scenario": "none"})", nullptr, nullptr, &out), MG_ERR_USAGE);
  EXPECT_EQ(mg_simulate("{}", "bogus", nullptr, &out), MG_ERR_USAGE);
}
