#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "sketchbench.h"

namespace {

std::string write_toy(const std::string& name) {
    const std::string path = "/tmp/sketchbench_capi_" + name;
    std::ofstream out(path);
    // 8 samples, 5 features, separable by feature 1.
    out << "1 1:2.0 3:0.5\n";
    out << "0 1:-2.0 4:1.0\n";
    out << "1 1:1.5 2:0.25\n";
    out << "0 1:-1.0 5:0.75\n";
    out << "1 1:2.5\n";
    out << "0 1:-2.25 2:0.1\n";
    out << "1 1:1.75 5:0.3\n";
    out << "0 1:-1.5 3:0.2\n";
    return path;
}

struct StringGuard {
    char* str = nullptr;
    ~StringGuard() { skb_string_free(str); }
};

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(skb_version()) == "1.0.0");
    CHECK(std::string(skb_status_name(SKB_OK)) == "ok");
    CHECK(std::string(skb_status_name(SKB_ERR_PARSE)) == "parse error");
}

TEST_CASE("dataset lifecycle") {
    const std::string path = write_toy("ds.svm");
    skb_dataset* ds = nullptr;
    REQUIRE(skb_dataset_open_libsvm(path.c_str(), 0, &ds) == SKB_OK);
    int64_t rows = 0, cols = 0, classes = 0;
    CHECK(skb_dataset_dims(ds, &rows, &cols, &classes) == SKB_OK);
    CHECK(rows == 8);
    CHECK(cols == 5);
    CHECK(classes == 2);
    double sparsity = 0.0;
    CHECK(skb_dataset_sparsity(ds, &sparsity) == SKB_OK);
    CHECK(sparsity == doctest::Approx(1.0 - 15.0 / 40.0));
    skb_dataset_free(ds);

    SUBCASE("missing file reports an io error with a message") {
        skb_dataset* bad = nullptr;
        CHECK(skb_dataset_open_libsvm("/nonexistent.svm", 0, &bad) == SKB_ERR_IO);
        CHECK(std::strlen(skb_last_error()) > 0);
    }

    SUBCASE("null arguments are rejected") {
        CHECK(skb_dataset_open_libsvm(nullptr, 0, &ds) ==
              SKB_ERR_INVALID_ARGUMENT);
    }
}

TEST_CASE("sketcher fit, transform, and blob round trip") {
    const std::string path = write_toy("sk.svm");
    skb_dataset* ds = nullptr;
    REQUIRE(skb_dataset_open_libsvm(path.c_str(), 0, &ds) == SKB_OK);

    skb_sketcher* sketcher = nullptr;
    REQUIRE(skb_sketcher_fit(ds, "countsketch", 3, 42, nullptr, &sketcher) ==
            SKB_OK);

    skb_matrix* sketched = nullptr;
    REQUIRE(skb_sketcher_transform(sketcher, ds, &sketched) == SKB_OK);
    int64_t rows = 0, cols = 0, count = 0;
    CHECK(skb_matrix_dims(sketched, &rows, &cols) == SKB_OK);
    CHECK(rows == 8);
    CHECK(cols == 3);
    CHECK(skb_matrix_nnz(sketched, &count) == SKB_OK);
    CHECK(count <= 15);

    StringGuard blob;
    REQUIRE(skb_sketcher_to_json(sketcher, &blob.str) == SKB_OK);
    skb_sketcher* restored = nullptr;
    REQUIRE(skb_sketcher_from_json(blob.str, &restored) == SKB_OK);
    skb_matrix* again = nullptr;
    REQUIRE(skb_sketcher_transform(restored, ds, &again) == SKB_OK);
    int64_t count2 = 0;
    CHECK(skb_matrix_nnz(again, &count2) == SKB_OK);
    CHECK(count2 == count);

    SUBCASE("esck params json is honored") {
        skb_sketcher* esck = nullptr;
        REQUIRE(skb_sketcher_fit(ds, "esck_full", 2, 7,
                                 "{\"lambda\": 5.0, \"iters\": 4}",
                                 &esck) == SKB_OK);
        StringGuard esck_blob;
        REQUIRE(skb_sketcher_to_json(esck, &esck_blob.str) == SKB_OK);
        CHECK(std::string(esck_blob.str).find("\"esck\"") != std::string::npos);
        skb_sketcher_free(esck);
    }

    SUBCASE("unknown method is invalid") {
        skb_sketcher* bad = nullptr;
        CHECK(skb_sketcher_fit(ds, "bogus", 2, 0, nullptr, &bad) ==
              SKB_ERR_INVALID_ARGUMENT);
    }

    SUBCASE("r >= d is invalid") {
        skb_sketcher* bad = nullptr;
        CHECK(skb_sketcher_fit(ds, "gaussian", 5, 0, nullptr, &bad) ==
              SKB_ERR_INVALID_ARGUMENT);
    }

    skb_matrix_free(sketched);
    skb_matrix_free(again);
    skb_sketcher_free(sketcher);
    skb_sketcher_free(restored);
    skb_dataset_free(ds);
}

TEST_CASE("matrix write and reload") {
    const std::string path = write_toy("mat.svm");
    skb_dataset* ds = nullptr;
    REQUIRE(skb_dataset_open_libsvm(path.c_str(), 0, &ds) == SKB_OK);
    skb_sketcher* sketcher = nullptr;
    REQUIRE(skb_sketcher_fit(ds, "countsketch", 3, 1, nullptr, &sketcher) ==
            SKB_OK);
    skb_matrix* sketched = nullptr;
    REQUIRE(skb_sketcher_transform(sketcher, ds, &sketched) == SKB_OK);

    const std::vector<int32_t> labels{1, 0, 1, 0, 1, 0, 1, 0};
    const std::string out = "/tmp/sketchbench_capi_out.svm";
    REQUIRE(skb_matrix_write_libsvm(sketched, labels.data(), labels.size(),
                                    out.c_str()) == SKB_OK);

    skb_dataset* reloaded = nullptr;
    REQUIRE(skb_dataset_open_libsvm(out.c_str(), 3, &reloaded) == SKB_OK);
    int64_t rows = 0, cols = 0;
    CHECK(skb_dataset_dims(reloaded, &rows, &cols, nullptr) == SKB_OK);
    CHECK(rows == 8);
    CHECK(cols == 3);

    double a = 0.0, b = 0.0;
    CHECK(skb_matrix_sparsity(sketched, &a) == SKB_OK);
    CHECK(skb_dataset_sparsity(reloaded, &b) == SKB_OK);
    CHECK(a == doctest::Approx(b));

    skb_dataset_free(reloaded);
    skb_matrix_free(sketched);
    skb_sketcher_free(sketcher);
    skb_dataset_free(ds);
}

TEST_CASE("linear model train and predict through the C API") {
    const std::string path = write_toy("model.svm");
    skb_dataset* ds = nullptr;
    REQUIRE(skb_dataset_open_libsvm(path.c_str(), 0, &ds) == SKB_OK);
    skb_sketcher* identity = nullptr;
    REQUIRE(skb_sketcher_fit(ds, "identity", 0, 0, nullptr, &identity) == SKB_OK);
    skb_matrix* features = nullptr;
    REQUIRE(skb_sketcher_transform(identity, ds, &features) == SKB_OK);

    const std::vector<int32_t> labels{0, 1, 0, 1, 0, 1, 0, 1};
    skb_model* model = nullptr;
    REQUIRE(skb_model_train(features, labels.data(), labels.size(), 2, 1e4, 1,
                            &model) == SKB_OK);

    std::vector<int32_t> predictions(8, -1);
    REQUIRE(skb_model_predict(model, features, predictions.data()) == SKB_OK);
    CHECK(predictions == labels);

    StringGuard blob;
    REQUIRE(skb_model_to_json(model, &blob.str) == SKB_OK);
    skb_model* restored = nullptr;
    REQUIRE(skb_model_from_json(blob.str, &restored) == SKB_OK);
    std::vector<int32_t> again(8, -1);
    REQUIRE(skb_model_predict(restored, features, again.data()) == SKB_OK);
    CHECK(again == predictions);

    skb_model_free(model);
    skb_model_free(restored);
    skb_matrix_free(features);
    skb_sketcher_free(identity);
    skb_dataset_free(ds);
}

TEST_CASE("bench run and result writing") {
    const std::string path = write_toy("bench.svm");
    const std::string config = "{\"data\":\"" + path +
                               "\",\"methods\":[\"countsketch\"],\"r\":[3],"
                               "\"seeds\":[1],\"c_grid\":[1.0,100.0],"
                               "\"folds\":2}";
    StringGuard result;
    REQUIRE(skb_bench_run(config.c_str(), &result.str) == SKB_OK);
    const std::string doc = result.str;
    CHECK(doc.find("\"kind\":\"bench\"") != std::string::npos);
    CHECK(doc.find("\"reports\"") != std::string::npos);

    const std::string csv_path = "/tmp/sketchbench_capi_bench.csv";
    REQUIRE(skb_result_write(result.str, "csv", csv_path.c_str()) == SKB_OK);
    std::ifstream in(csv_path);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line))
        if (line ==
            "dataset,method,r,acc_mean,acc_std,sparsity,embed_ms,predict_us")
            saw_header = true;
    CHECK(saw_header);

    REQUIRE(skb_result_write(result.str, "json",
                             "/tmp/sketchbench_capi_bench.json") == SKB_OK);
    CHECK(skb_result_write(result.str, "xml", "/tmp/x") ==
          SKB_ERR_INVALID_ARGUMENT);

    SUBCASE("sweep run") {
        const std::string sweep_config =
            "{\"data\":\"" + path +
            "\",\"methods\":[\"countsketch\"],\"r\":[3],\"seeds\":[1],"
            "\"c_grid\":[1.0],\"folds\":2,\"sweep\":\"r\"}";
        StringGuard sweep;
        REQUIRE(skb_sweep_run(sweep_config.c_str(), &sweep.str) == SKB_OK);
        CHECK(std::string(sweep.str).find("\"kind\":\"sweep\"") !=
              std::string::npos);
        REQUIRE(skb_result_write(sweep.str, "csv",
                                 "/tmp/sketchbench_capi_sweep.csv") == SKB_OK);
    }

    SUBCASE("bad config json") {
        StringGuard out;
        CHECK(skb_bench_run("{oops", &out.str) == SKB_ERR_PARSE);
        CHECK(std::strlen(skb_last_error()) > 0);
    }
}

TEST_CASE("sketch_file command") {
    const std::string path = write_toy("sketchcmd.svm");
    const std::string out = "/tmp/sketchbench_capi_sketched.svm";
    const std::string config = "{\"data\":\"" + path +
                               "\",\"methods\":[\"countsketch\"],\"r\":[2],"
                               "\"seeds\":[5],\"out\":\"" + out + "\"}";
    StringGuard result;
    REQUIRE(skb_sketch_file(config.c_str(), &result.str) == SKB_OK);
    const std::string doc = result.str;
    CHECK(doc.find("\"sparsity\"") != std::string::npos);

    skb_dataset* reloaded = nullptr;
    REQUIRE(skb_dataset_open_libsvm(out.c_str(), 2, &reloaded) == SKB_OK);
    int64_t rows = 0, cols = 0;
    CHECK(skb_dataset_dims(reloaded, &rows, &cols, nullptr) == SKB_OK);
    CHECK(rows == 8);
    CHECK(cols == 2);
    skb_dataset_free(reloaded);
}
