#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osaas/errors.hpp"
#include "osaas/rng.hpp"

namespace osaas {

// Contiguous dot product / scaled accumulate; the building blocks every layer
// reduces to, kept separate so the hot loops stay vectorizable.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

void check_finite(const double* x, std::size_t n, const std::string& what);

// One learnable tensor with its gradient and Adam moment accumulators.
struct Param {
  std::vector<double> value, grad, m, v;

  void resize(std::size_t n) {
    value.assign(n, 0.0);
    grad.assign(n, 0.0);
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update; t is the 1-based global step count.
void adam_step(Param& p, double lr, int t, const AdamHyper& h = {});

// U(-sqrt(6/fan_in), +sqrt(6/fan_in)) weight init, zero bias.
void kaiming_uniform(Param& p, int fan_in, Rng& rng);

// Fully connected layer, weights row-major (out x in). Activations are
// batch-major (batch x features). backward() accumulates parameter gradients
// and writes the input gradient unless gx is null.
struct Dense {
  int in_features = 0;
  int out_features = 0;
  Param w, b;

  Dense() = default;
  Dense(int in, int out, Rng& rng);

  void forward(const double* x, double* y, int batch) const;
  void backward(const double* x, const double* gy, double* gx, int batch);
};

// 1-D convolution along the last axis of a (batch, channels, seqs, len)
// activation block: `seqs` independent sequences share the same kernels and
// are never mixed. Odd kernel, stride 1, zero padding keeps len unchanged.
// Weights are (out_channels x in_channels x kernel).
struct Conv1d {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  Param w, b;

  Conv1d() = default;
  Conv1d(int cin, int cout, int k, Rng& rng);

  void forward(const double* x, double* y, int batch, int seqs, int len) const;
  void backward(const double* x, const double* gy, double* gx, int batch, int seqs, int len);
};

// Self-normalizing ELU with the canonical constants.
constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

void selu_forward(const double* x, double* y, std::size_t n);
void selu_backward(const double* x, const double* gy, double* gx, std::size_t n);
void relu_forward(const double* x, double* y, std::size_t n);
void relu_backward(const double* x, const double* gy, double* gx, std::size_t n);

void softmax(const double* logits, double* probs, int n);

// Mean cross-entropy over the batch plus the fused gradient wrt the logits,
// (softmax - onehot) / batch.
double softmax_cross_entropy(const double* logits, const int* labels, int batch, int classes,
                             double* probs, double* glogits);

// Mean cross-entropy only (evaluation path).
double cross_entropy_loss(const double* logits, const int* labels, int batch, int classes);

std::string base64_encode(const std::uint8_t* data, std::size_t n);
std::vector<std::uint8_t> base64_decode(const std::string& s);

// Doubles as little-endian IEEE-754 bytes in base64; exact round trip.
nlohmann::json doubles_to_json(const std::vector<double>& v);
std::vector<double> doubles_from_json(const nlohmann::json& j);

}  // namespace osaas
