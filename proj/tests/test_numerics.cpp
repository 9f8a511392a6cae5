#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "aoilab/autodiff.hpp"
#include "aoilab/errors.hpp"
#include "aoilab/optim.hpp"
#include "aoilab/rng.hpp"
#include "support/gradcheck.hpp"

using namespace aoilab;
using namespace aoilab::nn;

namespace {

Tensor random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::matrix(r, c);
    for (auto& v : t.values()) {
        v = rng.uniform(lo, hi);
    }
    return t;
}

// Weighted sum with fixed pseudo-random weights, so every output entry
// contributes a distinct gradient.
Var project(Tape& tape, Var x) {
    const Tensor& v = x.value();
    Tensor w = Tensor::matrix(v.rows(), v.cols());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::sin(1.7 * static_cast<double>(i) + 0.3);
    }
    return sum(mul(x, tape.constant(w)));
}

}  // namespace

TEST_CASE("matmul matches hand arithmetic") {
    Tape tape(false);
    Var a = tape.constant(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
    Var b = tape.constant(Tensor({3, 2}, {7, 8, 9, 10, 11, 12}));
    const Tensor& c = matmul(a, b).value();
    CHECK(c == Tensor({2, 2}, {58, 64, 139, 154}));
    const Tensor& d = matmul_nt(a, a).value();
    CHECK(d == Tensor({2, 2}, {14, 32, 32, 77}));
}

TEST_CASE("shape mismatch names both shapes") {
    Tape tape(false);
    Var a = tape.constant(Tensor::matrix(2, 3));
    Var b = tape.constant(Tensor::matrix(2, 3));
    try {
        matmul(a, b);
        FAIL("expected a dimension error");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[2x3]") != std::string::npos);
        CHECK(msg.find("and [2x3]") != std::string::npos);
    }
    CHECK_THROWS_AS(add(a, tape.constant(Tensor::matrix(3, 2))), DimensionError);
    CHECK_THROWS_AS(add_row(a, tape.constant(Tensor::matrix(1, 2))), DimensionError);
}

TEST_CASE("softmax rows are normalized and masked entries vanish") {
    Rng rng(3);
    Tape tape(false);
    Var x = tape.constant(random_matrix(rng, 5, 9, -30.0, 30.0));
    const Tensor& p = softmax_rows(x).value();
    for (std::size_t i = 0; i < 5; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 9; ++j) {
            s += p(i, j);
        }
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    std::vector<bool> mask{true, false, false, true, false, false, false, false, true};
    const Tensor& q = softmax_rows(masked_fill(x, mask, -std::numeric_limits<double>::infinity())).value();
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(q(i, 0) == 0.0);
        CHECK(q(i, 3) == 0.0);
        CHECK(q(i, 8) == 0.0);
    }
}

TEST_CASE("backward basics") {
    Tape tape;
    Var x = tape.parameter(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
    Var unused = tape.parameter(Tensor({1, 2}, {1, 1}));
    Var loss = sum(x);
    tape.backward(loss);
    CHECK(tape.grad(x) == Tensor({2, 3}, 1.0));
    CHECK(tape.grad(unused) == Tensor({1, 2}, 0.0));
    CHECK_THROWS_AS(tape.backward(loss), ContractError);

    Tape t2;
    Var y = t2.parameter(Tensor::matrix(2, 2, 1.0));
    CHECK_THROWS_AS(t2.backward(y), ContractError);

    Tape t3(false);
    Var z = t3.constant(Tensor::scalar(1.0));
    CHECK_THROWS_AS(t3.backward(z), ContractError);
}

TEST_CASE("every primitive passes central differences") {
    Rng rng(11);
    const Tensor a = random_matrix(rng, 3, 4);
    const Tensor b = random_matrix(rng, 4, 5);
    const Tensor c = random_matrix(rng, 3, 4);
    const Tensor bt = random_matrix(rng, 5, 4);
    const Tensor row = random_matrix(rng, 1, 4);
    const Tensor pos = random_matrix(rng, 3, 4, 0.5, 2.0);
    Tensor away = random_matrix(rng, 3, 4, 0.1, 1.0);
    for (std::size_t i = 0; i < away.size(); i += 2) {
        away[i] = -away[i];
    }
    const Tensor g = random_matrix(rng, 1, 4, 0.5, 1.5);
    const Tensor beta = random_matrix(rng, 1, 4);

    auto check = [](const char* name, const std::vector<Tensor>& in, const testsupport::Builder& f) {
        INFO(name);
        CHECK(testsupport::gradient_error(in, f) < 1e-6);
    };
    check("matmul", {a, b}, [](Tape& t, const auto& v) { return project(t, matmul(v[0], v[1])); });
    check("matmul_nt", {a, bt}, [](Tape& t, const auto& v) { return project(t, matmul_nt(v[0], v[1])); });
    check("transpose", {a}, [](Tape& t, const auto& v) { return project(t, transpose(v[0])); });
    check("add", {a, c}, [](Tape& t, const auto& v) { return project(t, add(v[0], v[1])); });
    check("sub", {a, c}, [](Tape& t, const auto& v) { return project(t, sub(v[0], v[1])); });
    check("mul", {a, c}, [](Tape& t, const auto& v) { return project(t, mul(v[0], v[1])); });
    check("add_row", {a, row}, [](Tape& t, const auto& v) { return project(t, add_row(v[0], v[1])); });
    check("scale", {a}, [](Tape& t, const auto& v) { return project(t, scale(v[0], -2.5)); });
    check("tanh", {a}, [](Tape& t, const auto& v) { return project(t, nn::tanh(v[0])); });
    check("relu", {away}, [](Tape& t, const auto& v) { return project(t, relu(v[0])); });
    check("log", {pos}, [](Tape& t, const auto& v) { return project(t, nn::log(v[0])); });
    check("softmax_rows", {a}, [](Tape& t, const auto& v) { return project(t, softmax_rows(v[0])); });
    check("masked_fill", {a}, [](Tape& t, const auto& v) {
        return project(t, softmax_rows(masked_fill(v[0], {false, true, false, false},
                                                   -std::numeric_limits<double>::infinity())));
    });
    check("layer_norm", {a, g, beta},
          [](Tape& t, const auto& v) { return project(t, layer_norm(v[0], v[1], v[2])); });
    check("batch_norm_tokens", {a, g, beta},
          [](Tape& t, const auto& v) { return project(t, batch_norm_tokens(v[0], v[1], v[2])); });
    check("concat_cols", {a, c}, [](Tape& t, const auto& v) { return project(t, concat_cols({v[0], v[1], v[0]})); });
    check("concat_rows", {a, c}, [](Tape& t, const auto& v) { return project(t, concat_rows({v[0], v[1]})); });
    check("slice_cols", {a}, [](Tape& t, const auto& v) { return project(t, slice_cols(v[0], 1, 2)); });
    check("slice_rows", {a}, [](Tape& t, const auto& v) { return project(t, slice_rows(v[0], 1, 2)); });
    check("sum", {a}, [](Tape&, const auto& v) { return sum(mul(v[0], v[0])); });
    check("pick", {a}, [](Tape&, const auto& v) { return nn::log(pick(softmax_rows(v[0]), 2, 1)); });
}

TEST_CASE("three-layer MLP gradient matches central differences") {
    Rng rng(5);
    const std::vector<Tensor> in{random_matrix(rng, 6, 4), random_matrix(rng, 4, 8), random_matrix(rng, 1, 8),
                                 random_matrix(rng, 8, 8), random_matrix(rng, 1, 8), random_matrix(rng, 8, 3),
                                 random_matrix(rng, 1, 3)};
    auto mlp = [](Tape& t, const std::vector<Var>& v) {
        Var h = nn::tanh(add_row(matmul(v[0], v[1]), v[2]));
        h = nn::tanh(add_row(matmul(h, v[3]), v[4]));
        return project(t, add_row(matmul(h, v[5]), v[6]));
    };
    CHECK(testsupport::gradient_error(in, mlp) < 1e-6);
}

TEST_CASE("batch norm over tokens standardizes each feature") {
    Rng rng(8);
    Tape tape(false);
    Var x = tape.constant(random_matrix(rng, 7, 5, -40.0, 90.0));
    Var g = tape.constant(Tensor({1, 5}, 1.0));
    Var b = tape.constant(Tensor({1, 5}, 0.0));
    const Tensor& y = batch_norm_tokens(x, g, b).value();
    for (std::size_t j = 0; j < 5; ++j) {
        double mean = 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < 7; ++i) {
            mean += y(i, j) / 7.0;
        }
        for (std::size_t i = 0; i < 7; ++i) {
            var += (y(i, j) - mean) * (y(i, j) - mean) / 7.0;
        }
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-9);
    }
}

TEST_CASE("forward and backward are bit-reproducible") {
    auto run = [] {
        Rng rng(21);
        Tape tape;
        Var a = tape.parameter(random_matrix(rng, 4, 6));
        Var b = tape.parameter(random_matrix(rng, 6, 6));
        Var loss = sum(nn::tanh(layer_norm(matmul(a, b), tape.constant(Tensor({1, 6}, 1.0)),
                                           tape.constant(Tensor({1, 6}, 0.0)))));
        tape.backward(loss);
        return std::make_pair(tape.grad(a), tape.grad(b));
    };
    CHECK(run() == run());
}

TEST_CASE("adam update") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        std::vector<Tensor> p{Tensor({1, 3}, {1.0, -2.0, 3.0})};
        const auto before = p;
        AdamState st(p, {});
        for (int i = 0; i < 5; ++i) {
            adam_step(p, {Tensor({1, 3}, 0.0)}, st);
        }
        CHECK(p == before);
    }
    SUBCASE("constant gradient drives the parameter against its sign") {
        std::vector<Tensor> p{Tensor::scalar(0.0)};
        AdamState st(p, {0.01});
        double prev = 0.0;
        for (int i = 0; i < 50; ++i) {
            adam_step(p, {Tensor::scalar(2.0)}, st);
            CHECK(p[0][0] < prev);
            prev = p[0][0];
        }
    }
    SUBCASE("one step on a scalar matches the closed form") {
        // m = 0.1 g, v = 0.001 g^2; bias-corrected m_hat = g, v_hat = g^2.
        const double g = 0.5, lr = 0.1, eps = 1e-8;
        const double expected = 1.0 - lr * g / (std::sqrt(g * g) + eps);
        std::vector<Tensor> p{Tensor::scalar(1.0)};
        AdamState st(p, {lr, 0.9, 0.999, eps});
        adam_step(p, {Tensor::scalar(g)}, st);
        CHECK(p[0][0] == doctest::Approx(expected).epsilon(1e-15));
        CHECK(st.step == 1);
    }
    SUBCASE("mismatched shapes are rejected") {
        std::vector<Tensor> p{Tensor::matrix(2, 2)};
        AdamState st(p, {});
        CHECK_THROWS_AS(adam_step(p, {Tensor::matrix(1, 2)}, st), DimensionError);
    }
}

TEST_CASE("checkpoint container") {
    NamedTensors entries{{"config", text_tensor("{\"a\":1}")},
                         {"w", Tensor({2, 3}, {1.5, -2.0, 3.25, 0.0, 1e-300, -7.0})},
                         {"b", Tensor({1, 1}, {0.1})}};
    const std::string bytes = encode_checkpoint(entries);
    CHECK(bytes.substr(0, 4) == "TWA1");
    const NamedTensors back = decode_checkpoint(bytes);
    CHECK(back == entries);
    CHECK(tensor_text(back[0].second) == "{\"a\":1}");

    std::string corrupt = bytes;
    corrupt[20] = static_cast<char>(corrupt[20] ^ 0x40);
    CHECK_THROWS_AS(decode_checkpoint(corrupt), IoError);
    CHECK_THROWS_AS(decode_checkpoint("XXXX0000"), IoError);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 9)), IoError);

    const auto path = std::filesystem::temp_directory_path() / "aoilab_ckpt_test.twa";
    save_checkpoint(path, entries);
    CHECK(load_checkpoint(path) == entries);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_checkpoint(path), IoError);
}

TEST_CASE("param store lookup") {
    ParamStore s;
    s.add("a", Tensor::matrix(2, 2));
    s.add("b", Tensor::matrix(1, 3));
    CHECK(s.find("b") == 1);
    CHECK(s.parameter_count() == 7);
    CHECK_THROWS_AS(s.find("c"), IndexError);
    CHECK_THROWS_AS(s.add("a", Tensor::matrix(1, 1)), ContractError);
}
