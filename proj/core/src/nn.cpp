#include "ghostqc/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ghostqc::nn {

Tensor Tensor::zeros(std::vector<int> shape) {
  Tensor t;
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  t.shape = std::move(shape);
  t.data.assign(n, 0.0);
  return t;
}

double leaky_relu(double x, double slope) { return x >= 0.0 ? x : slope * x; }
double leaky_relu_deriv(double x, double slope) { return x >= 0.0 ? 1.0 : slope; }

// --- config -----------------------------------------------------------------

int NetConfig::num_blocks() const {
  int blocks = 0;
  for (int s = image_side; s > bottleneck_side(); s /= 2) ++blocks;
  return blocks;
}

std::vector<int> NetConfig::channel_schedule() const {
  std::vector<int> chans{8};  // stem output
  int c = 8;
  for (int b = 0; b < num_blocks(); ++b) {
    c = std::min(2 * c, 32);
    chans.push_back(c);
  }
  return chans;
}

void NetConfig::validate() const {
  if (feature_len < 1) throw std::invalid_argument("feature length must be positive");
  if (image_side < 8 || (image_side & (image_side - 1)) != 0) {
    throw std::invalid_argument("image side must be a power of two, at least 8");
  }
}

// --- parameter layout ----------------------------------------------------------

namespace {

int push(ClassicalParams& p, const std::string& name, std::vector<int> shape) {
  p.names.push_back(name);
  p.tensors.push_back(Tensor::zeros(std::move(shape)));
  return static_cast<int>(p.tensors.size()) - 1;
}

}  // namespace

ClassicalParams make_params(const NetConfig& config) {
  config.validate();
  ClassicalParams p;
  p.config = config;
  const int m = config.feature_len;
  const int s = config.image_side;

  if (config.front_linear) {
    p.front_w = push(p, "front.weight", {m, m});
    p.front_b = push(p, "front.bias", {m});
  }
  p.proj_w = push(p, "proj.weight", {s * s, m});
  p.proj_b = push(p, "proj.bias", {s * s});
  p.stem_w = push(p, "stem.weight", {8, 1, 3, 3});
  p.stem_b = push(p, "stem.bias", {8});

  const auto chans = config.channel_schedule();
  for (int b = 0; b < config.num_blocks(); ++b) {
    ClassicalParams::BlockIdx blk;
    blk.in_ch = chans[b];
    blk.out_ch = chans[b + 1];
    const std::string tag = "down" + std::to_string(b);
    blk.w1 = push(p, tag + ".conv1.weight", {blk.out_ch, blk.in_ch, 3, 3});
    blk.b1 = push(p, tag + ".conv1.bias", {blk.out_ch});
    blk.w2 = push(p, tag + ".conv2.weight", {blk.out_ch, blk.out_ch, 3, 3});
    blk.b2 = push(p, tag + ".conv2.bias", {blk.out_ch});
    blk.sw = push(p, tag + ".skip.weight", {blk.out_ch, blk.in_ch, 1, 1});
    blk.sb = push(p, tag + ".skip.bias", {blk.out_ch});
    p.down.push_back(blk);
  }
  for (int b = config.num_blocks() - 1; b >= 0; --b) {
    ClassicalParams::BlockIdx blk;
    blk.in_ch = chans[b + 1];
    blk.out_ch = chans[b];
    const std::string tag = "up" + std::to_string(config.num_blocks() - 1 - b);
    blk.w1 = push(p, tag + ".conv1.weight", {blk.out_ch, blk.in_ch, 3, 3});
    blk.b1 = push(p, tag + ".conv1.bias", {blk.out_ch});
    blk.w2 = push(p, tag + ".conv2.weight", {blk.out_ch, blk.out_ch, 3, 3});
    blk.b2 = push(p, tag + ".conv2.bias", {blk.out_ch});
    if (blk.in_ch != blk.out_ch) {
      blk.sw = push(p, tag + ".skip.weight", {blk.out_ch, blk.in_ch, 1, 1});
      blk.sb = push(p, tag + ".skip.bias", {blk.out_ch});
    }
    p.up.push_back(blk);
  }
  p.out_w = push(p, "head.weight", {1, 8, 3, 3});
  p.out_b = push(p, "head.bias", {1});
  return p;
}

long ClassicalParams::total_count() const {
  long n = 0;
  for (const auto& t : tensors) n += static_cast<long>(t.numel());
  return n;
}

long ClassicalParams::front_count() const {
  if (front_w < 0) return 0;
  return static_cast<long>(tensors[front_w].numel() + tensors[front_b].numel());
}

long ClassicalParams::proj_count() const {
  return static_cast<long>(tensors[proj_w].numel() + tensors[proj_b].numel());
}

long ClassicalParams::trunk_count() const {
  return total_count() - front_count() - proj_count();
}

// --- init ------------------------------------------------------------------------

namespace {

void xavier_fill(Tensor& w, Rng& rng) {
  double fan_in = 0.0, fan_out = 0.0;
  if (w.shape.size() == 2) {
    fan_out = w.shape[0];
    fan_in = w.shape[1];
  } else if (w.shape.size() == 4) {
    const double rf = static_cast<double>(w.shape[2] * w.shape[3]);
    fan_out = w.shape[0] * rf;
    fan_in = w.shape[1] * rf;
  } else {
    throw std::logic_error("xavier init expects 2-d or 4-d weights");
  }
  const double stddev = std::sqrt(2.0 / (fan_in + fan_out));
  for (auto& v : w.data) v = rng.normal(0.0, stddev);
}

}  // namespace

ClassicalParams init_params(const NetConfig& config, Rng& rng) {
  ClassicalParams p = make_params(config);
  for (std::size_t i = 0; i < p.tensors.size(); ++i) {
    if (p.names[i].ends_with(".bias")) continue;
    xavier_fill(p.tensors[i], rng);
  }
  return p;
}

std::vector<double> init_quantum_params(int count, int n_q, double scale, Rng& rng) {
  if (count < 0 || n_q < 1) throw std::invalid_argument("bad quantum init arguments");
  std::vector<double> v(static_cast<std::size_t>(count));
  const double stddev = std::sqrt(static_cast<double>(n_q));
  for (auto& x : v) x = scale * rng.normal(0.0, stddev);
  return v;
}

// --- primitive layers ---------------------------------------------------------------

namespace {

// y = W x + b with W [out, in].
std::vector<double> linear_fw(const Tensor& w, const Tensor& b, const std::vector<double>& x) {
  const int out = w.shape[0], in = w.shape[1];
  if (static_cast<int>(x.size()) != in) throw std::invalid_argument("linear input shape mismatch");
  std::vector<double> y(out);
  for (int o = 0; o < out; ++o) {
    double acc = b.data[o];
    const double* row = &w.data[static_cast<std::size_t>(o) * in];
    for (int i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
  return y;
}

void linear_bw(const Tensor& w, const std::vector<double>& x, const std::vector<double>& gy,
               std::vector<double>& gx, Tensor& gw, Tensor& gb) {
  const int out = w.shape[0], in = w.shape[1];
  gx.assign(in, 0.0);
  for (int o = 0; o < out; ++o) {
    const double g = gy[o];
    gb.data[o] += g;
    const double* row = &w.data[static_cast<std::size_t>(o) * in];
    double* grow = &gw.data[static_cast<std::size_t>(o) * in];
    for (int i = 0; i < in; ++i) {
      grow[i] += g * x[i];
      gx[i] += row[i] * g;
    }
  }
}

// Conv over [C,H,W] tensors; kernel k in {1,3}, pad k/2, stride in {1,2}.
Tensor conv_fw(const Tensor& x, const Tensor& w, const Tensor& b, int stride) {
  const int cin = x.shape[0], h = x.shape[1], wd = x.shape[2];
  const int cout = w.shape[0], k = w.shape[2];
  if (w.shape[1] != cin) throw std::invalid_argument("conv channel mismatch");
  const int pad = k / 2;
  const int oh = h / stride, ow = wd / stride;
  Tensor y = Tensor::zeros({cout, oh, ow});
  for (int co = 0; co < cout; ++co) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = b.data[co];
        for (int ci = 0; ci < cin; ++ci) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            const double* xin = &x.data[(static_cast<std::size_t>(ci) * h + iy) * wd];
            const double* wrow =
                &w.data[((static_cast<std::size_t>(co) * cin + ci) * k + ky) * k];
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= wd) continue;
              acc += wrow[kx] * xin[ix];
            }
          }
        }
        y.data[(static_cast<std::size_t>(co) * oh + oy) * ow + ox] = acc;
      }
    }
  }
  return y;
}

void conv_bw(const Tensor& x, const Tensor& w, int stride, const Tensor& gy, Tensor& gx,
             Tensor& gw, Tensor& gb) {
  const int cin = x.shape[0], h = x.shape[1], wd = x.shape[2];
  const int cout = w.shape[0], k = w.shape[2];
  const int pad = k / 2;
  const int oh = gy.shape[1], ow = gy.shape[2];
  for (int co = 0; co < cout; ++co) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const double g = gy.data[(static_cast<std::size_t>(co) * oh + oy) * ow + ox];
        gb.data[co] += g;
        for (int ci = 0; ci < cin; ++ci) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            const double* xin = &x.data[(static_cast<std::size_t>(ci) * h + iy) * wd];
            double* gxin = &gx.data[(static_cast<std::size_t>(ci) * h + iy) * wd];
            const double* wrow =
                &w.data[((static_cast<std::size_t>(co) * cin + ci) * k + ky) * k];
            double* gwrow =
                &gw.data[((static_cast<std::size_t>(co) * cin + ci) * k + ky) * k];
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= wd) continue;
              gwrow[kx] += g * xin[ix];
              gxin[ix] += g * wrow[kx];
            }
          }
        }
      }
    }
  }
}

Tensor upsample2_fw(const Tensor& x) {
  const int c = x.shape[0], h = x.shape[1], w = x.shape[2];
  Tensor y = Tensor::zeros({c, 2 * h, 2 * w});
  for (int ci = 0; ci < c; ++ci) {
    for (int yy = 0; yy < h; ++yy) {
      for (int xx = 0; xx < w; ++xx) {
        const double v = x.data[(static_cast<std::size_t>(ci) * h + yy) * w + xx];
        const std::size_t base = (static_cast<std::size_t>(ci) * 2 * h + 2 * yy) * 2 * w + 2 * xx;
        y.data[base] = v;
        y.data[base + 1] = v;
        y.data[base + 2 * w] = v;
        y.data[base + 2 * w + 1] = v;
      }
    }
  }
  return y;
}

Tensor upsample2_bw(const Tensor& gy, int c, int h, int w) {
  Tensor gx = Tensor::zeros({c, h, w});
  for (int ci = 0; ci < c; ++ci) {
    for (int yy = 0; yy < h; ++yy) {
      for (int xx = 0; xx < w; ++xx) {
        const std::size_t base = (static_cast<std::size_t>(ci) * 2 * h + 2 * yy) * 2 * w + 2 * xx;
        gx.data[(static_cast<std::size_t>(ci) * h + yy) * w + xx] =
            gy.data[base] + gy.data[base + 1] + gy.data[base + 2 * w] + gy.data[base + 2 * w + 1];
      }
    }
  }
  return gx;
}

Tensor lrelu_fw(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = leaky_relu(v);
  return y;
}

void add_lrelu_bw(const Tensor& pre, const Tensor& gy, Tensor& gpre) {
  for (std::size_t i = 0; i < pre.data.size(); ++i) {
    gpre.data[i] = gy.data[i] * leaky_relu_deriv(pre.data[i]);
  }
}

}  // namespace

// --- forward --------------------------------------------------------------------

Tensor forward(const ClassicalParams& p, const std::vector<double>& features,
               ForwardCache* cache) {
  const auto& cfg = p.config;
  if (static_cast<int>(features.size()) != cfg.feature_len) {
    throw std::invalid_argument("feature length does not match network config");
  }
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};
  c.features = features;

  const std::vector<double>* x = &features;
  if (cfg.front_linear) {
    c.front_pre = linear_fw(p.tensors[p.front_w], p.tensors[p.front_b], features);
    c.front_act.resize(c.front_pre.size());
    for (std::size_t i = 0; i < c.front_pre.size(); ++i) {
      c.front_act[i] = leaky_relu(c.front_pre[i]);
    }
    x = &c.front_act;
  }

  const int s = cfg.image_side;
  c.proj_pre = linear_fw(p.tensors[p.proj_w], p.tensors[p.proj_b], *x);
  c.proj_act = Tensor::zeros({1, s, s});
  for (int i = 0; i < s * s; ++i) c.proj_act.data[i] = leaky_relu(c.proj_pre[i]);

  c.stem_pre = conv_fw(c.proj_act, p.tensors[p.stem_w], p.tensors[p.stem_b], 1);
  c.stem_act = lrelu_fw(c.stem_pre);

  Tensor cur = c.stem_act;
  for (const auto& blk : p.down) {
    BlockCache bc;
    bc.input = cur;
    bc.pre1 = conv_fw(bc.input, p.tensors[blk.w1], p.tensors[blk.b1], 2);
    bc.act1 = lrelu_fw(bc.pre1);
    bc.pre2 = conv_fw(bc.act1, p.tensors[blk.w2], p.tensors[blk.b2], 1);
    bc.skip_out = conv_fw(bc.input, p.tensors[blk.sw], p.tensors[blk.sb], 2);
    bc.sum = bc.pre2;
    for (std::size_t i = 0; i < bc.sum.data.size(); ++i) bc.sum.data[i] += bc.skip_out.data[i];
    cur = lrelu_fw(bc.sum);
    c.down.push_back(std::move(bc));
  }

  for (const auto& blk : p.up) {
    BlockCache bc;
    bc.input = cur;
    bc.upsampled = upsample2_fw(bc.input);
    bc.pre1 = conv_fw(bc.upsampled, p.tensors[blk.w1], p.tensors[blk.b1], 1);
    bc.act1 = lrelu_fw(bc.pre1);
    bc.pre2 = conv_fw(bc.act1, p.tensors[blk.w2], p.tensors[blk.b2], 1);
    if (blk.sw >= 0) {
      bc.skip_out = conv_fw(bc.upsampled, p.tensors[blk.sw], p.tensors[blk.sb], 1);
    } else {
      bc.skip_out = bc.upsampled;
    }
    bc.sum = bc.pre2;
    for (std::size_t i = 0; i < bc.sum.data.size(); ++i) bc.sum.data[i] += bc.skip_out.data[i];
    cur = lrelu_fw(bc.sum);
    c.up.push_back(std::move(bc));
  }

  c.head_in = cur;
  c.out_pre = conv_fw(cur, p.tensors[p.out_w], p.tensors[p.out_b], 1);
  c.output = Tensor::zeros({s, s});
  for (int i = 0; i < s * s; ++i) {
    c.output.data[i] = 1.0 / (1.0 + std::exp(-c.out_pre.data[i]));
  }
  return c.output;
}

// --- backward -------------------------------------------------------------------

BackwardResult backward(const ClassicalParams& p, const ForwardCache& cache,
                        const Tensor& output_grad) {
  const auto& cfg = p.config;
  if (cache.output.data.empty()) throw std::invalid_argument("backward needs a forward cache");
  if (output_grad.numel() != cache.output.numel()) {
    throw std::invalid_argument("output gradient shape mismatch");
  }

  BackwardResult res;
  res.param_grads.reserve(p.tensors.size());
  for (const auto& t : p.tensors) res.param_grads.push_back(Tensor::zeros(t.shape));

  const int s = cfg.image_side;
  Tensor g_outpre = Tensor::zeros({1, s, s});
  for (int i = 0; i < s * s; ++i) {
    const double y = cache.output.data[i];
    g_outpre.data[i] = output_grad.data[i] * y * (1.0 - y);
  }

  // head conv
  Tensor g_cur = Tensor::zeros(cache.head_in.shape);
  conv_bw(cache.head_in, p.tensors[p.out_w], 1, g_outpre, g_cur, res.param_grads[p.out_w],
          res.param_grads[p.out_b]);

  // up blocks, reversed
  for (int bi = static_cast<int>(p.up.size()) - 1; bi >= 0; --bi) {
    const auto& blk = p.up[bi];
    const auto& bc = cache.up[bi];
    Tensor g_sum = Tensor::zeros(bc.sum.shape);
    add_lrelu_bw(bc.sum, g_cur, g_sum);

    Tensor g_act1 = Tensor::zeros(bc.act1.shape);
    conv_bw(bc.act1, p.tensors[blk.w2], 1, g_sum, g_act1, res.param_grads[blk.w2],
            res.param_grads[blk.b2]);
    Tensor g_pre1 = Tensor::zeros(bc.pre1.shape);
    add_lrelu_bw(bc.pre1, g_act1, g_pre1);

    Tensor g_ups = Tensor::zeros(bc.upsampled.shape);
    conv_bw(bc.upsampled, p.tensors[blk.w1], 1, g_pre1, g_ups, res.param_grads[blk.w1],
            res.param_grads[blk.b1]);
    if (blk.sw >= 0) {
      conv_bw(bc.upsampled, p.tensors[blk.sw], 1, g_sum, g_ups, res.param_grads[blk.sw],
              res.param_grads[blk.sb]);
    } else {
      for (std::size_t i = 0; i < g_ups.data.size(); ++i) g_ups.data[i] += g_sum.data[i];
    }
    g_cur = upsample2_bw(g_ups, bc.input.shape[0], bc.input.shape[1], bc.input.shape[2]);
  }

  // down blocks, reversed
  for (int bi = static_cast<int>(p.down.size()) - 1; bi >= 0; --bi) {
    const auto& blk = p.down[bi];
    const auto& bc = cache.down[bi];
    Tensor g_sum = Tensor::zeros(bc.sum.shape);
    add_lrelu_bw(bc.sum, g_cur, g_sum);

    Tensor g_act1 = Tensor::zeros(bc.act1.shape);
    conv_bw(bc.act1, p.tensors[blk.w2], 1, g_sum, g_act1, res.param_grads[blk.w2],
            res.param_grads[blk.b2]);
    Tensor g_pre1 = Tensor::zeros(bc.pre1.shape);
    add_lrelu_bw(bc.pre1, g_act1, g_pre1);

    Tensor g_in = Tensor::zeros(bc.input.shape);
    conv_bw(bc.input, p.tensors[blk.w1], 2, g_pre1, g_in, res.param_grads[blk.w1],
            res.param_grads[blk.b1]);
    conv_bw(bc.input, p.tensors[blk.sw], 2, g_sum, g_in, res.param_grads[blk.sw],
            res.param_grads[blk.sb]);
    g_cur = std::move(g_in);
  }

  // stem
  Tensor g_stem_pre = Tensor::zeros(cache.stem_pre.shape);
  add_lrelu_bw(cache.stem_pre, g_cur, g_stem_pre);
  Tensor g_proj_act = Tensor::zeros(cache.proj_act.shape);
  conv_bw(cache.proj_act, p.tensors[p.stem_w], 1, g_stem_pre, g_proj_act,
          res.param_grads[p.stem_w], res.param_grads[p.stem_b]);

  // projection linear
  std::vector<double> g_proj_pre(static_cast<std::size_t>(s) * s);
  for (int i = 0; i < s * s; ++i) {
    g_proj_pre[i] = g_proj_act.data[i] * leaky_relu_deriv(cache.proj_pre[i]);
  }
  const std::vector<double>& proj_in = cfg.front_linear ? cache.front_act : cache.features;
  std::vector<double> g_x;
  linear_bw(p.tensors[p.proj_w], proj_in, g_proj_pre, g_x, res.param_grads[p.proj_w],
            res.param_grads[p.proj_b]);

  if (cfg.front_linear) {
    std::vector<double> g_front_pre(g_x.size());
    for (std::size_t i = 0; i < g_x.size(); ++i) {
      g_front_pre[i] = g_x[i] * leaky_relu_deriv(cache.front_pre[i]);
    }
    linear_bw(p.tensors[p.front_w], cache.features, g_front_pre, res.feature_grad,
              res.param_grads[p.front_w], res.param_grads[p.front_b]);
  } else {
    res.feature_grad = std::move(g_x);
  }
  return res;
}

// --- optimizer ----------------------------------------------------------------------

AdamState AdamState::for_sizes(const std::vector<std::size_t>& sizes) {
  AdamState st;
  st.sizes = sizes;
  st.m.reserve(sizes.size());
  st.v.reserve(sizes.size());
  for (std::size_t n : sizes) {
    st.m.emplace_back(n, 0.0);
    st.v.emplace_back(n, 0.0);
  }
  return st;
}

void adam_step(AdamState& state, const AdamConfig& config, const std::vector<double*>& params,
               const std::vector<const double*>& grads) {
  if (params.size() != state.sizes.size() || grads.size() != state.sizes.size()) {
    throw std::invalid_argument("adam group count mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t g = 0; g < params.size(); ++g) {
    double* p = params[g];
    const double* gr = grads[g];
    auto& m = state.m[g];
    auto& v = state.v[g];
    for (std::size_t i = 0; i < state.sizes[g]; ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gr[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gr[i] * gr[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
    }
  }
}

// --- checkpoints -----------------------------------------------------------------------

namespace {

void write_le_double(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

double read_le_double(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("truncated checkpoint data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

void checkpoint_save(const std::string& path, const nlohmann::json& header,
                     const std::vector<const Tensor*>& blocks) {
  nlohmann::json h = header;
  nlohmann::json shapes = nlohmann::json::array();
  for (const Tensor* t : blocks) shapes.push_back(t->shape);
  h["shapes"] = shapes;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << h.dump() << '\n';
  for (const Tensor* t : blocks) {
    for (double v : t->data) write_le_double(out, v);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint checkpoint_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("missing checkpoint header");
  Checkpoint ck;
  ck.header = nlohmann::json::parse(line);
  for (const auto& shape_json : ck.header.at("shapes")) {
    std::vector<int> shape = shape_json.get<std::vector<int>>();
    Tensor t = Tensor::zeros(shape);
    for (auto& v : t.data) v = read_le_double(in);
    ck.blocks.push_back(std::move(t));
  }
  return ck;
}

}  // namespace ghostqc::nn
