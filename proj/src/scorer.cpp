#include "tsptw/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tsptw/parallel.hpp"
#include "tsptw/rng.hpp"

namespace tsptw::policy {

namespace {

constexpr double kNormEpsilon = 1e-5;
constexpr int kGradBlock = 8;  // samples per reduction block

struct LayerOffsets {
  std::size_t w = 0, b = 0, gamma = 0, beta = 0;
  int in = 0, out = 0;
};

struct Layout {
  std::vector<LayerOffsets> hidden;
  std::size_t head_w = 0, head_b = 0;
  int head_in = 0;
  std::size_t total = 0;
};

Layout make_layout(const ScorerShape& shape) {
  Layout layout;
  std::size_t off = 0;
  int in = shape.input_dim;
  for (int width : shape.hidden) {
    LayerOffsets lo;
    lo.in = in;
    lo.out = width;
    lo.w = off;
    off += static_cast<std::size_t>(width) * in;
    lo.b = off;
    off += width;
    lo.gamma = off;
    off += width;
    lo.beta = off;
    off += width;
    layout.hidden.push_back(lo);
    in = width;
  }
  layout.head_w = off;
  off += in;
  layout.head_b = off;
  off += 1;
  layout.head_in = in;
  layout.total = off;
  return layout;
}

// Per-layer activations kept for the backward pass.
struct LayerTrace {
  std::vector<double> input;
  std::vector<double> xhat;     // normalized pre-activation
  std::vector<double> post;     // relu output
  std::vector<double> relu_in;  // gamma * xhat + beta
  double inv_std = 0.0;
};

struct Workspace {
  std::vector<LayerTrace> layers;
  std::vector<double> x;
};

double forward(const double* p, const Layout& layout, const std::vector<double>& input,
               Workspace* ws) {
  const std::vector<double>* cur = &input;
  if (ws) ws->layers.resize(layout.hidden.size());
  for (std::size_t l = 0; l < layout.hidden.size(); ++l) {
    const LayerOffsets& lo = layout.hidden[l];
    LayerTrace* trace = ws ? &ws->layers[l] : nullptr;
    if (trace) trace->input = *cur;

    static thread_local std::vector<double> z;
    z.assign(lo.out, 0.0);
    for (int o = 0; o < lo.out; ++o) {
      const double* w_row = p + lo.w + static_cast<std::size_t>(o) * lo.in;
      double acc = p[lo.b + o];
      for (int i = 0; i < lo.in; ++i) acc += w_row[i] * (*cur)[i];
      z[o] = acc;
    }

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= lo.out;
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= lo.out;
    const double inv_std = 1.0 / std::sqrt(var + kNormEpsilon);

    static thread_local std::vector<double> h;
    h.assign(lo.out, 0.0);
    if (trace) {
      trace->xhat.assign(lo.out, 0.0);
      trace->relu_in.assign(lo.out, 0.0);
      trace->inv_std = inv_std;
    }
    for (int o = 0; o < lo.out; ++o) {
      const double xhat = (z[o] - mean) * inv_std;
      const double y = p[lo.gamma + o] * xhat + p[lo.beta + o];
      if (trace) {
        trace->xhat[o] = xhat;
        trace->relu_in[o] = y;
      }
      h[o] = y > 0.0 ? y : 0.0;
    }
    if (trace) trace->post = h;
    if (ws) {
      ws->x = h;
      cur = &ws->x;
    } else {
      static thread_local std::vector<double> hold;
      hold = h;
      cur = &hold;
    }
  }

  double logit = p[layout.head_b];
  const double* w = p + layout.head_w;
  for (int i = 0; i < layout.head_in; ++i) logit += w[i] * (*cur)[i];
  return logit;
}

// dlogit -> parameter gradients, traversing the stored trace backwards.
void backward(const double* p, const Layout& layout, const Workspace& ws, double dlogit,
              double* grad) {
  static thread_local std::vector<double> dh;
  const std::vector<double>& top = ws.layers.empty() ? ws.x : ws.layers.back().post;
  dh.assign(top.size(), 0.0);
  for (std::size_t i = 0; i < top.size(); ++i) {
    grad[layout.head_w + i] += dlogit * top[i];
    dh[i] = dlogit * p[layout.head_w + i];
  }
  grad[layout.head_b] += dlogit;

  for (std::size_t l = layout.hidden.size(); l-- > 0;) {
    const LayerOffsets& lo = layout.hidden[l];
    const LayerTrace& trace = ws.layers[l];

    static thread_local std::vector<double> dxhat;
    dxhat.assign(lo.out, 0.0);
    double mean_dxhat = 0.0;
    double mean_dxhat_xhat = 0.0;
    for (int o = 0; o < lo.out; ++o) {
      const double dy = trace.relu_in[o] > 0.0 ? dh[o] : 0.0;
      grad[lo.gamma + o] += dy * trace.xhat[o];
      grad[lo.beta + o] += dy;
      dxhat[o] = dy * p[lo.gamma + o];
      mean_dxhat += dxhat[o];
      mean_dxhat_xhat += dxhat[o] * trace.xhat[o];
    }
    mean_dxhat /= lo.out;
    mean_dxhat_xhat /= lo.out;

    static thread_local std::vector<double> dz;
    dz.assign(lo.out, 0.0);
    for (int o = 0; o < lo.out; ++o) {
      dz[o] = trace.inv_std * (dxhat[o] - mean_dxhat - trace.xhat[o] * mean_dxhat_xhat);
    }

    static thread_local std::vector<double> dx;
    dx.assign(lo.in, 0.0);
    for (int o = 0; o < lo.out; ++o) {
      const double g = dz[o];
      if (g == 0.0) continue;
      double* w_grad = grad + lo.w + static_cast<std::size_t>(o) * lo.in;
      const double* w_row = p + lo.w + static_cast<std::size_t>(o) * lo.in;
      for (int i = 0; i < lo.in; ++i) {
        w_grad[i] += g * trace.input[i];
        dx[i] += g * w_row[i];
      }
      grad[lo.b + o] += g;
    }
    dh = dx;
  }
}

std::vector<double> scorer_input(const std::vector<double>& row,
                                 const std::vector<double>& context) {
  std::vector<double> x;
  x.reserve(row.size() + context.size());
  x.insert(x.end(), row.begin(), row.end());
  x.insert(x.end(), context.begin(), context.end());
  return x;
}

// Cross-entropy of one sample; optionally accumulates scale * gradient.
double sample_loss_impl(const double* p, const Layout& layout,
                        const features::TrainingSample& sample, double scale, double* grad) {
  const std::size_t c = sample.state.rows.size();
  if (c == 0) throw std::invalid_argument("scorer: sample with no candidates");
  if (sample.expert_choice < 0 || static_cast<std::size_t>(sample.expert_choice) >= c) {
    throw std::invalid_argument("scorer: expert choice out of range");
  }

  std::vector<Workspace> traces(grad ? c : 0);
  std::vector<double> logits(c);
  Workspace scratch;
  for (std::size_t i = 0; i < c; ++i) {
    const std::vector<double> x = scorer_input(sample.state.rows[i], sample.state.context);
    logits[i] = forward(p, layout, x, grad ? &traces[i] : &scratch);
    if (grad && layout.hidden.empty()) traces[i].x = x;
  }

  const std::vector<double> probs = softmax(logits);
  const double loss = -std::log(std::max(probs[sample.expert_choice], 1e-300));
  if (grad) {
    for (std::size_t i = 0; i < c; ++i) {
      const double dlogit =
          probs[i] - (static_cast<int>(i) == sample.expert_choice ? 1.0 : 0.0);
      backward(p, layout, traces[i], scale * dlogit, grad);
    }
  }
  return loss;
}

}  // namespace

std::size_t ScorerShape::parameter_count() const { return make_layout(*this).total; }

ScorerParams init_scorer(int input_dim, std::vector<int> hidden, std::uint64_t seed) {
  if (input_dim < 1) throw std::invalid_argument("init_scorer: input_dim must be >= 1");
  for (int w : hidden) {
    if (w < 1) throw std::invalid_argument("init_scorer: hidden widths must be >= 1");
  }
  ScorerParams params;
  params.shape = ScorerShape{input_dim, std::move(hidden)};
  const Layout layout = make_layout(params.shape);
  params.values.assign(layout.total, 0.0);

  rng::Stream rs = rng::substream(seed, "scorer-init");
  for (const LayerOffsets& lo : layout.hidden) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(lo.in));
    for (std::size_t i = 0; i < static_cast<std::size_t>(lo.out) * lo.in; ++i) {
      params.values[lo.w + i] = rs.uniform(-bound, bound);
    }
    for (int o = 0; o < lo.out; ++o) params.values[lo.gamma + o] = 1.0;
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(layout.head_in));
  for (int i = 0; i < layout.head_in; ++i) {
    params.values[layout.head_w + i] = rs.uniform(-bound, bound);
  }
  return params;
}

std::vector<double> score_candidates(const ScorerParams& params,
                                     const std::vector<std::vector<double>>& rows,
                                     const std::vector<double>& context) {
  const Layout layout = make_layout(params.shape);
  std::vector<double> logits(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::vector<double> x = scorer_input(rows[i], context);
    if (static_cast<int>(x.size()) != params.shape.input_dim) {
      throw std::invalid_argument("score_candidates: input width " + std::to_string(x.size()) +
                                  " does not match scorer width " +
                                  std::to_string(params.shape.input_dim));
    }
    logits[i] = forward(params.values.data(), layout, x, nullptr);
  }
  return logits;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

double batch_loss(const ScorerParams& params,
                  const std::vector<features::TrainingSample>& samples,
                  const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("batch_loss: empty batch");
  const Layout layout = make_layout(params.shape);
  double total = 0.0;
  for (std::size_t idx : indices) {
    total += sample_loss_impl(params.values.data(), layout, samples[idx], 0.0, nullptr);
  }
  return total / static_cast<double>(indices.size());
}

double batch_loss_and_grad(const ScorerParams& params,
                           const std::vector<features::TrainingSample>& samples,
                           const std::vector<std::size_t>& indices, std::vector<double>& grad,
                           int workers) {
  if (indices.empty()) throw std::invalid_argument("batch_loss_and_grad: empty batch");
  const Layout layout = make_layout(params.shape);
  const double scale = 1.0 / static_cast<double>(indices.size());

  const std::size_t block_count = (indices.size() + kGradBlock - 1) / kGradBlock;
  std::vector<std::vector<double>> block_grads(block_count);
  std::vector<double> block_losses(block_count, 0.0);

  parallel_for(block_count, workers, [&](std::size_t blk) {
    block_grads[blk].assign(layout.total, 0.0);
    const std::size_t lo = blk * kGradBlock;
    const std::size_t hi = std::min(indices.size(), lo + kGradBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      block_losses[blk] += sample_loss_impl(params.values.data(), layout, samples[indices[i]],
                                            scale, block_grads[blk].data());
    }
  });

  grad.assign(layout.total, 0.0);
  double total = 0.0;
  for (std::size_t blk = 0; blk < block_count; ++blk) {
    total += block_losses[blk];
    const std::vector<double>& bg = block_grads[blk];
    for (std::size_t j = 0; j < layout.total; ++j) grad[j] += bg[j];
  }
  return total * scale;
}

TrainResult train(const std::vector<features::TrainingSample>& samples, ScorerParams initial,
                  const TrainConfig& config) {
  if (samples.empty()) throw std::invalid_argument("train: no samples");
  if (config.batch_size < 1 || config.epochs < 1) {
    throw std::invalid_argument("train: batch_size and epochs must be >= 1");
  }
  for (const auto& s : samples) {
    const std::size_t width = s.state.rows.empty() ? 0 : s.state.rows[0].size();
    if (static_cast<int>(width + s.state.context.size()) != initial.shape.input_dim) {
      throw std::invalid_argument("train: sample width does not match scorer input");
    }
  }

  const Layout layout = make_layout(initial.shape);
  TrainResult result;
  result.params = std::move(initial);

  std::vector<double> grad(layout.total, 0.0);
  std::vector<double> m(layout.total, 0.0);
  std::vector<double> v(layout.total, 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  // Weight decay targets the linear weights only.
  std::vector<char> decay(layout.total, 0);
  for (const LayerOffsets& lo : layout.hidden) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(lo.out) * lo.in; ++i) decay[lo.w + i] = 1;
  }
  for (int i = 0; i < layout.head_in; ++i) decay[layout.head_w + i] = 1;

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng::Stream rs = rng::substream(config.seed, "train-shuffle", epoch);
    rs.shuffle(order);

    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::vector<std::size_t> batch(order.begin() + start, order.begin() + end);
      const double loss =
          batch_loss_and_grad(result.params, samples, batch, grad, config.workers);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch starting at " + std::to_string(start));
      }
      epoch_total += loss * static_cast<double>(batch.size());

      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t j = 0; j < layout.total; ++j) {
        m[j] = beta1 * m[j] + (1.0 - beta1) * grad[j];
        v[j] = beta2 * v[j] + (1.0 - beta2) * grad[j] * grad[j];
        const double update = (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps);
        double value = result.params.values[j] - config.learning_rate * update;
        if (decay[j]) value -= config.learning_rate * config.weight_decay * value;
        result.params.values[j] = value;
      }
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(samples.size()));
  }
  return result;
}

features::CandidateScorer make_candidate_scorer(const ScorerParams& params) {
  return [params](const std::vector<std::vector<double>>& rows,
                  const std::vector<double>& context) {
    return score_candidates(params, rows, context);
  };
}

}  // namespace tsptw::policy
