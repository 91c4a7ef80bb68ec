#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nicbench/model.hpp"
#include "nicbench/rng.hpp"
#include "nicbench/train.hpp"
#include "support/synthetic.hpp"

using namespace nicbench;

namespace {

ModelSpec small_spec(ModelVariant variant, int classes) {
    ModelSpec spec;
    spec.variant = variant;
    spec.classes = static_cast<std::size_t>(classes);
    spec.hidden = 8;
    spec.filters = 8;
    spec.kernel = 5;
    spec.pool = 3;
    spec.fc_width = 32;
    return spec;
}

std::size_t param_numel(ModelState<float>& model, const std::string& name) {
    std::size_t n = 0;
    model.visit_params([&](nn::ParamView<float> p) {
        if (name == p.name) n = p.value.size();
    });
    return n;
}

}  // namespace

TEST_CASE("model parameter shapes follow the architecture") {
    ModelSpec spec;
    spec.classes = 4;
    ModelState<float> baseline(spec);
    // Conv weights + bias for the 6-channel head: 64*(6*5) + 64 = 1984.
    CHECK(param_numel(baseline, "head0.conv.w") + param_numel(baseline, "head0.conv.b") == 1984);

    spec.variant = ModelVariant::Head2;
    ModelState<float> head2(spec);
    CHECK(head2.head_count() == 2);
    // Per-head conv on a 3-channel input: 64*(3*5) + 64 = 1024.
    CHECK(param_numel(head2, "head0.conv.w") + param_numel(head2, "head0.conv.b") == 1024);
    CHECK(param_numel(head2, "head1.conv.w") + param_numel(head2, "head1.conv.b") == 1024);

    spec.variant = ModelVariant::Head3;
    ModelState<float> head3(spec);
    CHECK(head3.head_count() == 3);
    const auto partitions = spec.head_channels();
    REQUIRE(partitions.size() == 3);
    CHECK(partitions[0] == std::vector<std::size_t>{0, 3});
    CHECK(partitions[1] == std::vector<std::size_t>{1, 4});
    CHECK(partitions[2] == std::vector<std::size_t>{2, 5});

    ModelSpec bad;
    bad.classes = 1;
    CHECK_THROWS_AS(ModelState<float>(bad), std::invalid_argument);
}

TEST_CASE("head2 consumes the same data as baseline, only partitioned") {
    // Both models: F=1, k=1 conv that passes channel 0 through, identity
    // classifier stack (fc weights reveal the head features as logits).
    // Head2's first head must then reproduce the baseline head exactly.
    auto build = [](ModelVariant variant) {
        ModelSpec spec;
        spec.variant = variant;
        spec.classes = 8;
        spec.hidden = 1;
        spec.filters = 1;
        spec.kernel = 1;
        spec.pool = 2;
        spec.fc_width = 8;
        spec.dropout_p = 0.0;
        return spec;
    };

    ModelState<float> baseline(build(ModelVariant::Baseline));
    ModelState<float> head2(build(ModelVariant::Head2));

    Rng rng(5);
    // Identical LSTM weights for every head of both models.
    nn::BiLstm<float> reference(1, 1);
    reference.init(rng);
    auto copy_lstm = [&](nn::BiLstm<float>& dst) {
        dst.forward_dir().wx.value = reference.forward_dir().wx.value;
        dst.forward_dir().wh.value = reference.forward_dir().wh.value;
        dst.forward_dir().b.value = reference.forward_dir().b.value;
        dst.backward_dir().wx.value = reference.backward_dir().wx.value;
        dst.backward_dir().wh.value = reference.backward_dir().wh.value;
        dst.backward_dir().b.value = reference.backward_dir().b.value;
    };
    copy_lstm(baseline.head_lstm(0));
    copy_lstm(head2.head_lstm(0));
    copy_lstm(head2.head_lstm(1));

    // Conv passthrough of the head's first channel (global channel 0 in both
    // cases: fx).
    baseline.head_conv(0).weights().value.at(0, 0) = 1.0f;
    head2.head_conv(0).weights().value.at(0, 0) = 1.0f;

    // Identity fc stack: logits = padded head features.
    for (std::size_t i = 0; i < 8; ++i) baseline.fc1().weights().value.at(i, i % 2) = 0.0f;
    auto identity_fc = [](ModelState<float>& m, std::size_t feat_dim) {
        for (std::size_t i = 0; i < feat_dim; ++i) m.fc1().weights().value.at(i, i) = 1.0f;
        for (std::size_t i = 0; i < 8; ++i) m.fc2().weights().value.at(i, i) = 1.0f;
    };
    identity_fc(baseline, 2);
    identity_fc(head2, 4);

    nn::Tensor<float> x(6, 12);
    Rng data(7);
    for (auto& v : x.v) v = static_cast<float>(data.uniform(0.0, 2.0));

    const auto base_logits = baseline.forward(x, false);
    std::vector<float> base_feat(base_logits.v.begin(), base_logits.v.begin() + 2);
    const auto head_logits = head2.forward(x, false);
    CHECK(head_logits[0] == Catch::Approx(base_feat[0]).margin(1e-6));
    CHECK(head_logits[1] == Catch::Approx(base_feat[1]).margin(1e-6));
}

TEST_CASE("training reaches 100% on a separable two-class problem") {
    auto data = synthetic::separable_windows(2, 100, 30, 24, 99);
    synthetic::normalize_split(data);
    const auto train_set = to_model_inputs<float>(data.train);
    const auto test_set = to_model_inputs<float>(data.test);

    ModelState<float> model(small_spec(ModelVariant::Baseline, 2));
    model.init(7);

    TrainConfig cfg;
    cfg.batch = 8;
    cfg.epochs = 5;
    cfg.seed = 7;
    const auto log = train_model(model, train_set, test_set, cfg);
    CHECK(log.final_test_acc == 100.0);
}

TEST_CASE("first-batch loss is near ln K at initialization") {
    for (int classes : {2, 4, 6}) {
        auto data = synthetic::separable_windows(classes, 12, 2, 24, 17);
        synthetic::normalize_split(data);
        const auto train_set = to_model_inputs<float>(data.train);

        ModelState<float> model(small_spec(ModelVariant::Baseline, classes));
        model.init(31);
        nn::SoftmaxXent<float> xent;
        double loss = 0.0;
        const std::size_t batch = std::min<std::size_t>(64, train_set.size());
        for (std::size_t i = 0; i < batch; ++i) {
            xent.forward(model.forward(train_set.inputs[i], false), train_set.labels[i]);
            loss += xent.loss;
        }
        loss /= static_cast<double>(batch);
        CHECK(loss == Catch::Approx(std::log(double(classes))).epsilon(0.2));
    }
}

TEST_CASE("training is deterministic for a fixed seed") {
    auto data = synthetic::separable_windows(3, 20, 6, 20, 23);
    synthetic::normalize_split(data);
    const auto train_set = to_model_inputs<float>(data.train);
    const auto test_set = to_model_inputs<float>(data.test);

    TrainConfig cfg;
    cfg.batch = 16;
    cfg.epochs = 3;
    cfg.seed = 1234;

    auto run = [&] {
        ModelState<float> model(small_spec(ModelVariant::Baseline, 3));
        model.init(cfg.seed);
        auto log = train_model(model, train_set, test_set, cfg);
        std::vector<float> params;
        model.visit_params([&](nn::ParamView<float> p) {
            params.insert(params.end(), p.value.begin(), p.value.end());
        });
        return std::pair{log.final_test_acc, params};
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);  // bitwise identical parameters
}

TEST_CASE("training loss trends down over early epochs") {
    auto data = synthetic::separable_windows(3, 40, 10, 20, 37);
    synthetic::normalize_split(data);
    const auto train_set = to_model_inputs<float>(data.train);
    const auto test_set = to_model_inputs<float>(data.test);

    ModelState<float> model(small_spec(ModelVariant::Head2, 3));
    model.init(11);
    TrainConfig cfg;
    cfg.batch = 16;
    cfg.epochs = 4;
    cfg.seed = 11;
    const auto log = train_model(model, train_set, test_set, cfg);

    int non_increasing = 0;
    for (std::size_t e = 1; e < log.epochs.size(); ++e)
        if (log.epochs[e].train_loss <= log.epochs[e - 1].train_loss + 1e-9) ++non_increasing;
    CHECK(non_increasing >= 2);
}

TEST_CASE("evaluate edge cases") {
    auto data = synthetic::separable_windows(4, 4, 5, 16, 41);
    synthetic::normalize_split(data);
    const auto test_set = to_model_inputs<float>(data.test);

    // Constant-prediction model (zero weights): argmax is class 0 on every
    // window, so accuracy on balanced data is exactly 100/K.
    ModelState<float> zero_model(small_spec(ModelVariant::Baseline, 4));
    CHECK(evaluate(zero_model, test_set) == Catch::Approx(25.0).margin(1e-12));

    // Permutation invariance.
    ModelState<float> model(small_spec(ModelVariant::Baseline, 4));
    model.init(3);
    const double acc = evaluate(model, test_set);
    WindowTensors<float> reversed;
    for (std::size_t i = test_set.size(); i-- > 0;) {
        reversed.inputs.push_back(test_set.inputs[i]);
        reversed.labels.push_back(test_set.labels[i]);
    }
    CHECK(evaluate(model, reversed) == acc);

    WindowTensors<float> empty;
    CHECK_THROWS_AS(evaluate(model, empty), std::invalid_argument);
}

TEST_CASE("a trained model evaluated on its own train set scores highly") {
    auto data = synthetic::separable_windows(2, 30, 10, 20, 53);
    synthetic::normalize_split(data);
    const auto train_set = to_model_inputs<float>(data.train);
    const auto test_set = to_model_inputs<float>(data.test);
    ModelState<float> model(small_spec(ModelVariant::Baseline, 2));
    model.init(5);
    TrainConfig cfg;
    cfg.batch = 8;
    cfg.epochs = 5;
    cfg.seed = 5;
    train_model(model, train_set, test_set, cfg);
    CHECK(evaluate(model, train_set) == 100.0);
}

TEST_CASE("train validates inputs") {
    auto data = synthetic::separable_windows(2, 4, 2, 16, 61);
    synthetic::normalize_split(data);
    const auto train_set = to_model_inputs<float>(data.train);
    const auto test_set = to_model_inputs<float>(data.test);

    ModelState<float> model(small_spec(ModelVariant::Baseline, 2));
    model.init(1);
    TrainConfig cfg;
    WindowTensors<float> empty;
    CHECK_THROWS_AS(train_model(model, empty, test_set, cfg), train_error);
    CHECK_THROWS_AS(train_model(model, train_set, empty, cfg), train_error);

    auto bad = train_set;
    bad.labels[0] = 5;  // out of range for 2 classes
    CHECK_THROWS_AS(train_model(model, bad, test_set, cfg), train_error);
}

TEST_CASE("training log emits one parseable record per epoch") {
    auto data = synthetic::separable_windows(2, 10, 4, 16, 71);
    synthetic::normalize_split(data);
    const auto train_set = to_model_inputs<float>(data.train);
    const auto test_set = to_model_inputs<float>(data.test);

    ModelState<float> model(small_spec(ModelVariant::Baseline, 2));
    model.init(9);
    TrainConfig cfg;
    cfg.batch = 8;
    cfg.epochs = 3;
    cfg.seed = 9;
    std::ostringstream log_stream;
    train_model(model, train_set, test_set, cfg, &log_stream);

    std::istringstream lines(log_stream.str());
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("epoch").get<std::size_t>() == count + 1);
        CHECK(j.contains("train_loss"));
        CHECK(j.contains("test_acc"));
        CHECK(j.contains("wall_ms"));
        ++count;
    }
    CHECK(count == 3);
}

TEST_CASE("checkpoints round-trip and reject mismatched specs") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "nicbench_ckpt_test.ckpt";

    auto data = synthetic::separable_windows(3, 8, 4, 16, 81);
    synthetic::normalize_split(data);
    const auto test_set = to_model_inputs<float>(data.test);

    ModelState<float> model(small_spec(ModelVariant::Head3, 3));
    model.init(77);
    const double acc = evaluate(model, test_set);
    save_checkpoint(model, path.string());

    ModelState<float> restored(small_spec(ModelVariant::Head3, 3));
    load_checkpoint(restored, path.string());
    CHECK(evaluate(restored, test_set) == acc);

    ModelState<float> other(small_spec(ModelVariant::Head2, 3));
    CHECK_THROWS_WITH(load_checkpoint(other, path.string()),
                      Catch::Matchers::ContainsSubstring("spec mismatch"));
    fs::remove(path);
}
