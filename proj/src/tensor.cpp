#include "osaas/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace osaas {

double dot(const double* a, const double* b, std::size_t n) {
  // Independent partial sums keep the multiply-add pipeline full; a single
  // running sum would serialize on the floating-point add latency.
  constexpr std::size_t kChains = 16;
  double acc[kChains] = {};
  std::size_t i = 0;
  for (; i + kChains <= n; i += kChains)
    for (std::size_t j = 0; j < kChains; ++j) acc[j] += a[i + j] * b[i + j];
  double s = 0.0;
  for (; i < n; ++i) s += a[i] * b[i];
  for (std::size_t j = 0; j < kChains; ++j) s += acc[j];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void check_finite(const double* x, std::size_t n, const std::string& what) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i]))
      throw SimulationError("non-finite value in " + what + " at index " + std::to_string(i));
}

void adam_step(Param& p, double lr, int t, const AdamHyper& h) {
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);
  const std::size_t n = p.value.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = p.grad[i];
    p.m[i] = h.beta1 * p.m[i] + (1.0 - h.beta1) * g;
    p.v[i] = h.beta2 * p.v[i] + (1.0 - h.beta2) * g * g;
    const double mhat = p.m[i] / bc1;
    const double vhat = p.v[i] / bc2;
    p.value[i] -= lr * mhat / (std::sqrt(vhat) + h.eps);
  }
}

void kaiming_uniform(Param& p, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / fan_in);
  for (double& w : p.value) w = rng.uniform(-bound, bound);
}

Dense::Dense(int in, int out, Rng& rng) : in_features(in), out_features(out) {
  w.resize(static_cast<std::size_t>(in) * out);
  b.resize(static_cast<std::size_t>(out));
  kaiming_uniform(w, in, rng);
}

// The dense layers are large enough (the first fully connected layer holds a
// multi-megabyte weight matrix) that naive per-sample loops are bound by
// re-streaming weights and gradients through the cache once per sample.
// Both passes therefore work in small register blocks that share each
// streamed operand chunk; the compile-time widths let the compiler unroll
// fully and keep the accumulators in vector registers.  The backward pass
// preserves the per-element addend order of the naive loops exactly
// (weight-gradient entries accumulate in ascending sample order,
// input-gradient entries in ascending output order).  The forward pass
// reduces each output through fixed vector-lane partial sums instead of a
// serial dot product, which changes the rounding association; every
// association used is fixed at compile time, so results are still
// deterministic for a given build.
namespace {
constexpr int kPanel = 32;     // elements per register panel

template <int N>
inline void fma_row(double* acc, double g, const double* src) {
#pragma omp simd
  for (int k = 0; k < N; ++k) acc[k] += g * src[k];
}
inline void fma_row_n(double* acc, double g, const double* src, int n) {
  for (int k = 0; k < n; ++k) acc[k] += g * src[k];
}
}  // namespace

void Dense::forward(const double* x, double* y, int batch) const {
  const std::size_t in = static_cast<std::size_t>(in_features);
  // Blocks of four samples by two outputs keep eight vector accumulators in
  // registers and share every streamed weight and input chunk.
  constexpr int kLanes = 4;
  const int kfull = in_features / kLanes * kLanes;
  int bi = 0;
  for (; bi + 4 <= batch; bi += 4) {
    const double* xr[4] = {x + bi * in, x + (bi + 1) * in, x + (bi + 2) * in, x + (bi + 3) * in};
    int o = 0;
    for (; o + 2 <= out_features; o += 2) {
      const double* w0 = w.value.data() + static_cast<std::size_t>(o) * in;
      const double* w1 = w0 + in;
      double acc[4][2][kLanes] = {};
      for (int c = 0; c < kfull; c += kLanes)
        for (int r = 0; r < 4; ++r) {
          const double* xc = xr[r] + c;
#pragma omp simd
          for (int l = 0; l < kLanes; ++l) {
            acc[r][0][l] += xc[l] * w0[c + l];
            acc[r][1][l] += xc[l] * w1[c + l];
          }
        }
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 2; ++s) {
          const double* wr = s == 0 ? w0 : w1;
          double sum = 0.0;
          for (int l = 0; l < kLanes; ++l) sum += acc[r][s][l];
          for (int k = kfull; k < in_features; ++k) sum += xr[r][k] * wr[k];
          y[static_cast<std::size_t>(bi + r) * out_features + o + s] = b.value[o + s] + sum;
        }
    }
    for (; o < out_features; ++o) {
      const double* wr = w.value.data() + static_cast<std::size_t>(o) * in;
      for (int r = 0; r < 4; ++r)
        y[static_cast<std::size_t>(bi + r) * out_features + o] =
            b.value[o] + dot(wr, xr[r], in);
    }
  }
  for (; bi < batch; ++bi) {
    const double* xrow = x + bi * in;
    for (int o = 0; o < out_features; ++o)
      y[static_cast<std::size_t>(bi) * out_features + o] =
          b.value[o] + dot(w.value.data() + static_cast<std::size_t>(o) * in, xrow, in);
  }
}

void Dense::backward(const double* x, const double* gy, double* gx, int batch) {
  const std::size_t in = static_cast<std::size_t>(in_features);
  for (int o = 0; o < out_features; ++o)
    for (int bi = 0; bi < batch; ++bi) {
      const double g = gy[static_cast<std::size_t>(bi) * out_features + o];
      if (g != 0.0) b.grad[o] += g;
    }
  // Weight gradients: gw[o] accumulates g(bi)·x(bi) in ascending-sample
  // order.  Pairs of output rows share each streamed input chunk.
  for (int i0 = 0; i0 < in_features; i0 += kPanel) {
    const int im = std::min(kPanel, in_features - i0);
    if (im == kPanel) {
      int o = 0;
      for (; o + 1 < out_features; o += 2) {
        double* gw0 = w.grad.data() + static_cast<std::size_t>(o) * in + i0;
        double* gw1 = w.grad.data() + static_cast<std::size_t>(o + 1) * in + i0;
        double a0[kPanel], a1[kPanel];
        for (int k = 0; k < kPanel; ++k) a0[k] = gw0[k];
        for (int k = 0; k < kPanel; ++k) a1[k] = gw1[k];
        for (int bi = 0; bi < batch; ++bi) {
          const double* xc = x + static_cast<std::size_t>(bi) * in + i0;
          const double g0 = gy[static_cast<std::size_t>(bi) * out_features + o];
          const double g1 = gy[static_cast<std::size_t>(bi) * out_features + o + 1];
          if (g0 != 0.0) fma_row<kPanel>(a0, g0, xc);
          if (g1 != 0.0) fma_row<kPanel>(a1, g1, xc);
        }
        for (int k = 0; k < kPanel; ++k) gw0[k] = a0[k];
        for (int k = 0; k < kPanel; ++k) gw1[k] = a1[k];
      }
      if (o < out_features) {
        double* gw0 = w.grad.data() + static_cast<std::size_t>(o) * in + i0;
        double a0[kPanel];
        for (int k = 0; k < kPanel; ++k) a0[k] = gw0[k];
        for (int bi = 0; bi < batch; ++bi) {
          const double g0 = gy[static_cast<std::size_t>(bi) * out_features + o];
          if (g0 != 0.0) fma_row<kPanel>(a0, g0, x + static_cast<std::size_t>(bi) * in + i0);
        }
        for (int k = 0; k < kPanel; ++k) gw0[k] = a0[k];
      }
    } else {
      for (int o = 0; o < out_features; ++o) {
        double* gwc = w.grad.data() + static_cast<std::size_t>(o) * in + i0;
        for (int bi = 0; bi < batch; ++bi) {
          const double g = gy[static_cast<std::size_t>(bi) * out_features + o];
          if (g != 0.0) fma_row_n(gwc, g, x + static_cast<std::size_t>(bi) * in + i0, im);
        }
      }
    }
  }
  if (!gx) return;
  // Input gradients: gx[bi] accumulates g(o)·w(o) in ascending-output order.
  // Pairs of samples share each streamed weight chunk.
  std::fill(gx, gx + static_cast<std::size_t>(batch) * in, 0.0);
  for (int i0 = 0; i0 < in_features; i0 += kPanel) {
    const int im = std::min(kPanel, in_features - i0);
    if (im == kPanel) {
      int bi = 0;
      for (; bi + 1 < batch; bi += 2) {
        double a0[kPanel] = {};
        double a1[kPanel] = {};
        for (int o = 0; o < out_features; ++o) {
          const double* wc = w.value.data() + static_cast<std::size_t>(o) * in + i0;
          const double g0 = gy[static_cast<std::size_t>(bi) * out_features + o];
          const double g1 = gy[static_cast<std::size_t>(bi + 1) * out_features + o];
          if (g0 != 0.0) fma_row<kPanel>(a0, g0, wc);
          if (g1 != 0.0) fma_row<kPanel>(a1, g1, wc);
        }
        double* gx0 = gx + static_cast<std::size_t>(bi) * in + i0;
        double* gx1 = gx + static_cast<std::size_t>(bi + 1) * in + i0;
        for (int k = 0; k < kPanel; ++k) gx0[k] = a0[k];
        for (int k = 0; k < kPanel; ++k) gx1[k] = a1[k];
      }
      if (bi < batch) {
        double a0[kPanel] = {};
        for (int o = 0; o < out_features; ++o) {
          const double g0 = gy[static_cast<std::size_t>(bi) * out_features + o];
          if (g0 != 0.0)
            fma_row<kPanel>(a0, g0, w.value.data() + static_cast<std::size_t>(o) * in + i0);
        }
        double* gx0 = gx + static_cast<std::size_t>(bi) * in + i0;
        for (int k = 0; k < kPanel; ++k) gx0[k] = a0[k];
      }
    } else {
      for (int o = 0; o < out_features; ++o) {
        const double* wc = w.value.data() + static_cast<std::size_t>(o) * in + i0;
        for (int bi = 0; bi < batch; ++bi) {
          const double g = gy[static_cast<std::size_t>(bi) * out_features + o];
          if (g != 0.0) fma_row_n(gx + static_cast<std::size_t>(bi) * in + i0, g, wc, im);
        }
      }
    }
  }
}

Conv1d::Conv1d(int cin, int cout, int k, Rng& rng)
    : in_channels(cin), out_channels(cout), kernel(k) {
  if (k % 2 == 0) throw ValidationError("conv kernel must be odd for same-padding");
  w.resize(static_cast<std::size_t>(cout) * cin * k);
  b.resize(static_cast<std::size_t>(cout));
  kaiming_uniform(w, cin * k, rng);
}

// The sequences here are short (a handful of positions), so applying each
// kernel tap row by row spends everything on loop setup.  Instead, each
// sample's input is expanded once into zero-padded, tap-shifted copies of
// every channel plane ("col" holds one seqs*len plane per (channel, tap)
// pair); the convolution then collapses to one contiguous multiply-accumulate
// over the whole plane per weight, and the backward pass to plane-wide dot
// products plus a scatter-add of the tap planes back onto the input grid.
namespace {
void build_tap_planes(const double* xb, double* col, int cin, int kernel, int seqs, int len) {
  const int half = kernel / 2;
  const std::size_t plane = static_cast<std::size_t>(seqs) * len;
  for (int c = 0; c < cin; ++c) {
    const double* xc = xb + static_cast<std::size_t>(c) * plane;
    for (int k = 0; k < kernel; ++k) {
      double* dst = col + (static_cast<std::size_t>(c) * kernel + k) * plane;
      const int d = k - half;  // tap plane row s holds x[c][s][t + d], zero outside
      const int t0 = std::max(0, -d);
      const int t1 = len - std::max(0, d);
      if (t1 <= t0) {
        std::fill(dst, dst + plane, 0.0);
        continue;
      }
      for (int s = 0; s < seqs; ++s) {
        double* dr = dst + static_cast<std::size_t>(s) * len;
        const double* xr = xc + static_cast<std::size_t>(s) * len;
        for (int t = 0; t < t0; ++t) dr[t] = 0.0;
        std::memcpy(dr + t0, xr + t0 + d, static_cast<std::size_t>(t1 - t0) * sizeof(double));
        for (int t = t1; t < len; ++t) dr[t] = 0.0;
      }
    }
  }
}
}  // namespace

void Conv1d::forward(const double* x, double* y, int batch, int seqs, int len) const {
  const std::size_t plane = static_cast<std::size_t>(seqs) * len;
  const std::size_t xplane = static_cast<std::size_t>(in_channels) * plane;
  const std::size_t yplane = static_cast<std::size_t>(out_channels) * plane;
  const int taps = in_channels * kernel;
  static thread_local std::vector<double> col;
  col.resize(static_cast<std::size_t>(taps) * plane);
  constexpr int kConvPanel = 24;
  const std::size_t pfull = plane / kConvPanel * kConvPanel;
  const int prem = static_cast<int>(plane - pfull);
  for (int bi = 0; bi < batch; ++bi) {
    const double* xb = x + bi * xplane;
    double* yb = y + bi * yplane;
    build_tap_planes(xb, col.data(), in_channels, kernel, seqs, len);
    for (int o = 0; o < out_channels; ++o) {
      const double* wo = w.value.data() + static_cast<std::size_t>(o) * taps;
      double* yo = yb + static_cast<std::size_t>(o) * plane;
      for (std::size_t p0 = 0; p0 < pfull; p0 += kConvPanel) {
        double acc[kConvPanel];
        for (int k = 0; k < kConvPanel; ++k) acc[k] = b.value[o];
        for (int j = 0; j < taps; ++j)
          fma_row<kConvPanel>(acc, wo[j], col.data() + static_cast<std::size_t>(j) * plane + p0);
        for (int k = 0; k < kConvPanel; ++k) yo[p0 + k] = acc[k];
      }
      if (prem > 0) {
        for (int k = 0; k < prem; ++k) yo[pfull + k] = b.value[o];
        for (int j = 0; j < taps; ++j)
          fma_row_n(yo + pfull, wo[j], col.data() + static_cast<std::size_t>(j) * plane + pfull,
                    prem);
      }
    }
  }
}

void Conv1d::backward(const double* x, const double* gy, double* gx, int batch, int seqs, int len) {
  const int half = kernel / 2;
  const std::size_t plane = static_cast<std::size_t>(seqs) * len;
  const std::size_t xplane = static_cast<std::size_t>(in_channels) * plane;
  const std::size_t yplane = static_cast<std::size_t>(out_channels) * plane;
  const int taps = in_channels * kernel;
  constexpr int kConvPanel = 24;
  // colt holds the tap planes transposed (position-major): row t lists every
  // (channel, tap) input feeding output position t, so weight gradients
  // accumulate through a register panel instead of per-tap dot products.
  static thread_local std::vector<double> colt;
  static thread_local std::vector<double> gcol;
  colt.resize(static_cast<std::size_t>(taps) * plane);
  if (gx) {
    gcol.resize(static_cast<std::size_t>(taps) * plane);
    std::fill(gx, gx + batch * xplane, 0.0);
  }
  const int tfull = taps / kConvPanel * kConvPanel;
  const int trem = taps - tfull;
  const std::size_t pfull = plane / kConvPanel * kConvPanel;
  const int prem = static_cast<int>(plane - pfull);
  for (int bi = 0; bi < batch; ++bi) {
    const double* xb = x + bi * xplane;
    const double* gyb = gy + bi * yplane;
    for (int s = 0; s < seqs; ++s)
      for (int t = 0; t < len; ++t) {
        double* row = colt.data() + (static_cast<std::size_t>(s) * len + t) * taps;
        for (int c = 0; c < in_channels; ++c) {
          const double* xr =
              xb + static_cast<std::size_t>(c) * plane + static_cast<std::size_t>(s) * len;
          for (int k = 0; k < kernel; ++k) {
            const int ts = t + k - half;
            row[c * kernel + k] = (ts >= 0 && ts < len) ? xr[ts] : 0.0;
          }
        }
      }
    for (int o = 0; o < out_channels; ++o) {
      const double* go = gyb + static_cast<std::size_t>(o) * plane;
      double bsum = 0.0;
#pragma omp simd reduction(+ : bsum)
      for (std::size_t i = 0; i < plane; ++i) bsum += go[i];
      b.grad[o] += bsum;
      double* gwo = w.grad.data() + static_cast<std::size_t>(o) * taps;
      for (int j0 = 0; j0 < tfull; j0 += kConvPanel) {
        double acc[kConvPanel];
        for (int k = 0; k < kConvPanel; ++k) acc[k] = gwo[j0 + k];
        for (std::size_t t = 0; t < plane; ++t)
          fma_row<kConvPanel>(acc, go[t], colt.data() + t * taps + j0);
        for (int k = 0; k < kConvPanel; ++k) gwo[j0 + k] = acc[k];
      }
      if (trem > 0) {
        double acc[kConvPanel];
        for (int k = 0; k < trem; ++k) acc[k] = gwo[tfull + k];
        for (std::size_t t = 0; t < plane; ++t)
          fma_row_n(acc, go[t], colt.data() + t * taps + tfull, trem);
        for (int k = 0; k < trem; ++k) gwo[tfull + k] = acc[k];
      }
    }
    if (gx) {
      for (int j = 0; j < taps; ++j) {
        double* gj = gcol.data() + static_cast<std::size_t>(j) * plane;
        for (std::size_t p0 = 0; p0 < pfull; p0 += kConvPanel) {
          double acc[kConvPanel];
          for (int k = 0; k < kConvPanel; ++k) acc[k] = 0.0;
          for (int o = 0; o < out_channels; ++o)
            fma_row<kConvPanel>(acc, w.value[static_cast<std::size_t>(o) * taps + j],
                                gyb + static_cast<std::size_t>(o) * plane + p0);
          for (int k = 0; k < kConvPanel; ++k) gj[p0 + k] = acc[k];
        }
        if (prem > 0) {
          double acc[kConvPanel];
          for (int k = 0; k < prem; ++k) acc[k] = 0.0;
          for (int o = 0; o < out_channels; ++o)
            fma_row_n(acc, w.value[static_cast<std::size_t>(o) * taps + j],
                      gyb + static_cast<std::size_t>(o) * plane + pfull, prem);
          for (int k = 0; k < prem; ++k) gj[pfull + k] = acc[k];
        }
      }
      double* gxb = gx + bi * xplane;
      for (int c = 0; c < in_channels; ++c) {
        double* gxc = gxb + static_cast<std::size_t>(c) * plane;
        for (int k = 0; k < kernel; ++k) {
          const double* src = gcol.data() + (static_cast<std::size_t>(c) * kernel + k) * plane;
          const int d = k - half;
          const int t0 = std::max(0, -d);
          const int t1 = len - std::max(0, d);
          if (t1 <= t0) continue;
          for (int s = 0; s < seqs; ++s) {
            const double* sr = src + static_cast<std::size_t>(s) * len;
            double* dr = gxc + static_cast<std::size_t>(s) * len + d;
            for (int t = t0; t < t1; ++t) dr[t] += sr[t];
          }
        }
      }
    }
  }
}

void selu_forward(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = x[i] > 0.0 ? kSeluLambda * x[i] : kSeluLambda * kSeluAlpha * std::expm1(x[i]);
}

void selu_backward(const double* x, const double* gy, double* gx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    gx[i] = gy[i] * (x[i] > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x[i]));
}

void relu_forward(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* gy, double* gx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) gx[i] = x[i] > 0.0 ? gy[i] : 0.0;
}

void softmax(const double* logits, double* probs, int n) {
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += (probs[i] = std::exp(logits[i] - mx));
  for (int i = 0; i < n; ++i) probs[i] /= sum;
}

double softmax_cross_entropy(const double* logits, const int* labels, int batch, int classes,
                             double* probs, double* glogits) {
  double loss = 0.0;
  const double inv_batch = 1.0 / batch;
  for (int bi = 0; bi < batch; ++bi) {
    const double* lr = logits + static_cast<std::size_t>(bi) * classes;
    double* pr = probs + static_cast<std::size_t>(bi) * classes;
    softmax(lr, pr, classes);
    const int y = labels[bi];
    loss -= std::log(std::max(pr[y], 1e-300));
    if (glogits) {
      double* gr = glogits + static_cast<std::size_t>(bi) * classes;
      for (int c = 0; c < classes; ++c) gr[c] = (pr[c] - (c == y ? 1.0 : 0.0)) * inv_batch;
    }
  }
  return loss * inv_batch;
}

double cross_entropy_loss(const double* logits, const int* labels, int batch, int classes) {
  std::vector<double> probs(static_cast<std::size_t>(batch) * classes);
  return softmax_cross_entropy(logits, labels, batch, classes, probs.data(), nullptr);
}

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t n) {
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  for (std::size_t i = 0; i < n; i += 3) {
    std::uint32_t v = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < n) v |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < n) v |= data[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(i + 1 < n ? kB64[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < n ? kB64[v & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& s) {
  if (s.size() % 4 != 0) throw IoError("base64 payload length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = s[i + k];
      if (c == '=') {
        if (i + 4 != s.size() || k < 2) throw IoError("misplaced base64 padding");
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) throw IoError("misplaced base64 padding");
      const int d = b64_value(c);
      if (d < 0) throw IoError(std::string("invalid base64 byte '") + c + "'");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

nlohmann::json doubles_to_json(const std::vector<double>& v) {
  std::vector<std::uint8_t> bytes(v.size() * 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, &v[i], 8);
    for (int k = 0; k < 8; ++k) bytes[i * 8 + k] = static_cast<std::uint8_t>((u >> (8 * k)) & 0xff);
  }
  return nlohmann::json{{"count", v.size()},
                        {"float64_le", base64_encode(bytes.data(), bytes.size())}};
}

std::vector<double> doubles_from_json(const nlohmann::json& j) {
  const auto bytes = base64_decode(j.at("float64_le").get<std::string>());
  const std::size_t n = j.at("count").get<std::size_t>();
  if (bytes.size() != n * 8) throw IoError("tensor payload size mismatch");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(bytes[i * 8 + k]) << (8 * k);
    std::memcpy(&v[i], &u, 8);
  }
  return v;
}

}  // namespace osaas
