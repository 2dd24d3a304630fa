#ifndef AGAN_NN_HPP
#define AGAN_NN_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "agan/errors.hpp"
#include "agan/tensor.hpp"

namespace agan {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<MatRM<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const MatRM<T>>;

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<int> shape)
      : name(std::move(n)), value(shape), grad(shape) {}
  void zero_grad() { grad.set_zero(); }
};

/// One differentiable stage of a sequential network. forward() caches what
/// backward() needs, so a layer instance is owned by exactly one training
/// loop at a time. backward(dy, param_grads) accumulates parameter gradients
/// when param_grads is true and always returns the input gradient.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool training) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy, bool param_grads) = 0;
  virtual std::vector<Parameter<T>*> parameters() { return {}; }
  // Non-trainable state that still belongs in checkpoints (e.g. batchnorm
  // running statistics).
  virtual std::vector<Parameter<T>*> buffers() { return {}; }
  virtual void init(std::mt19937& rng) { (void)rng; }
  virtual std::string kind() const = 0;
};

template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(int in, int out)
      : in_(in), out_(out), weight_("weight", {in, out}), bias_("bias", {out}) {
    if (in < 1 || out < 1) throw ArgumentError("dense dims must be positive");
  }

  void init(std::mt19937& rng) override {
    fill_normal<T>(weight_.value, rng, T(0), T(0.02));
    bias_.value.set_zero();
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    const int b = x.dim(0);
    if (static_cast<int>(x.size()) != b * in_)
      throw ArgumentError("dense input expects " + std::to_string(in_) +
                          " features, got shape " +
                          Tensor<T>::shape_string(x.shape()));
    x_ = x;
    Tensor<T> y({b, out_});
    ConstMatMap<T> xm(x.data(), b, in_);
    ConstMatMap<T> wm(weight_.value.data(), in_, out_);
    MatMap<T> ym(y.data(), b, out_);
    ym.noalias() = xm * wm;
    ym.rowwise() += Eigen::Map<const Eigen::RowVector<T, Eigen::Dynamic>>(
        bias_.value.data(), out_);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool param_grads) override {
    const int b = dy.dim(0);
    ConstMatMap<T> dym(dy.data(), b, out_);
    ConstMatMap<T> xm(x_.data(), b, in_);
    ConstMatMap<T> wm(weight_.value.data(), in_, out_);
    if (param_grads) {
      MatMap<T> dwm(weight_.grad.data(), in_, out_);
      dwm.noalias() += xm.transpose() * dym;
      Eigen::Map<Eigen::RowVector<T, Eigen::Dynamic>> dbm(bias_.grad.data(),
                                                          out_);
      dbm += dym.colwise().sum();
    }
    Tensor<T> dx(x_.shape());
    MatMap<T> dxm(dx.data(), b, in_);
    dxm.noalias() = dym * wm.transpose();
    return dx;
  }

  std::vector<Parameter<T>*> parameters() override {
    return {&weight_, &bias_};
  }
  std::string kind() const override { return "dense"; }

  int in_features() const { return in_; }
  int out_features() const { return out_; }

 private:
  int in_, out_;
  Parameter<T> weight_, bias_;
  Tensor<T> x_;
};

template <typename T>
class LeakyRelu : public Layer<T> {
 public:
  explicit LeakyRelu(T slope = T(0.2)) : slope_(slope) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    x_ = x;
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
      y[i] = x[i] > T(0) ? x[i] : slope_ * x[i];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool) override {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i)
      dx[i] = x_[i] > T(0) ? dy[i] : slope_ * dy[i];
    return dx;
  }

  std::string kind() const override { return "leaky_relu"; }

 private:
  T slope_;
  Tensor<T> x_;
};

template <typename T>
class TanhLayer : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool) override {
    y_ = Tensor<T>(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y_[i] = std::tanh(x[i]);
    return y_;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool) override {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i)
      dx[i] = dy[i] * (T(1) - y_[i] * y_[i]);
    return dx;
  }

  std::string kind() const override { return "tanh"; }

 private:
  Tensor<T> y_;
};

/// y = a*x + b with fixed constants; used to move tanh output into [0,1].
template <typename T>
class FixedAffine : public Layer<T> {
 public:
  FixedAffine(T a, T b) : a_(a), b_(b) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a_ * x[i] + b_;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool) override {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = a_ * dy[i];
    return dx;
  }

  std::string kind() const override { return "fixed_affine"; }

 private:
  T a_, b_;
};

/// Reshapes [B, ...] to [B, tail...]; element count per sample must match.
template <typename T>
class Reshape : public Layer<T> {
 public:
  explicit Reshape(std::vector<int> tail) : tail_(std::move(tail)) {}

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    in_shape_ = x.shape();
    std::vector<int> out{x.dim(0)};
    out.insert(out.end(), tail_.begin(), tail_.end());
    return x.reshaped(out);
  }

  Tensor<T> backward(const Tensor<T>& dy, bool) override {
    return dy.reshaped(in_shape_);
  }

  std::string kind() const override { return "reshape"; }

 private:
  std::vector<int> tail_;
  std::vector<int> in_shape_;
};

namespace detail {

struct ConvGeom {
  int h_in, w_in, c_in;
  int h_out, w_out;
  int k, stride, pad;
};

/// Gathers k*k*C patches of img (HWC) into cols [h_out*w_out, k*k*C].
template <typename T>
void im2col(const T* img, const ConvGeom& g, T* cols) {
  const int kkc = g.k * g.k * g.c_in;
  for (int oy = 0; oy < g.h_out; ++oy) {
    for (int ox = 0; ox < g.w_out; ++ox) {
      T* row = cols + (static_cast<std::size_t>(oy) * g.w_out + ox) * kkc;
      for (int ky = 0; ky < g.k; ++ky) {
        const int iy = oy * g.stride + ky - g.pad;
        for (int kx = 0; kx < g.k; ++kx) {
          const int ix = ox * g.stride + kx - g.pad;
          T* dst = row + (ky * g.k + kx) * g.c_in;
          if (iy < 0 || iy >= g.h_in || ix < 0 || ix >= g.w_in) {
            for (int c = 0; c < g.c_in; ++c) dst[c] = T(0);
          } else {
            const T* src = img + (static_cast<std::size_t>(iy) * g.w_in + ix) * g.c_in;
            for (int c = 0; c < g.c_in; ++c) dst[c] = src[c];
          }
        }
      }
    }
  }
}

/// Adjoint of im2col: scatter-adds cols back into img (img must be zeroed).
template <typename T>
void col2im(const T* cols, const ConvGeom& g, T* img) {
  const int kkc = g.k * g.k * g.c_in;
  for (int oy = 0; oy < g.h_out; ++oy) {
    for (int ox = 0; ox < g.w_out; ++ox) {
      const T* row = cols + (static_cast<std::size_t>(oy) * g.w_out + ox) * kkc;
      for (int ky = 0; ky < g.k; ++ky) {
        const int iy = oy * g.stride + ky - g.pad;
        if (iy < 0 || iy >= g.h_in) continue;
        for (int kx = 0; kx < g.k; ++kx) {
          const int ix = ox * g.stride + kx - g.pad;
          if (ix < 0 || ix >= g.w_in) continue;
          const T* src = row + (ky * g.k + kx) * g.c_in;
          T* dst = img + (static_cast<std::size_t>(iy) * g.w_in + ix) * g.c_in;
          for (int c = 0; c < g.c_in; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

inline int conv_out(int in, int k, int stride, int pad) {
  const int num = in + 2 * pad - k;
  if (num < 0 || num % stride != 0)
    throw ArgumentError("conv geometry does not tile the input");
  return num / stride + 1;
}

}  // namespace detail

/// 2-D convolution over [B, H, W, C] tensors, implemented as im2col + GEMM.
template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(int c_in, int c_out, int k, int stride, int pad)
      : c_in_(c_in),
        c_out_(c_out),
        k_(k),
        stride_(stride),
        pad_(pad),
        weight_("weight", {k * k * c_in, c_out}),
        bias_("bias", {c_out}) {}

  void init(std::mt19937& rng) override {
    fill_normal<T>(weight_.value, rng, T(0), T(0.02));
    bias_.value.set_zero();
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.ndim() != 4 || x.dim(3) != c_in_)
      throw ArgumentError("conv2d expects [B,H,W," + std::to_string(c_in_) +
                          "], got " + Tensor<T>::shape_string(x.shape()));
    const int b = x.dim(0);
    g_ = {x.dim(1), x.dim(2), c_in_,
          detail::conv_out(x.dim(1), k_, stride_, pad_),
          detail::conv_out(x.dim(2), k_, stride_, pad_), k_, stride_, pad_};
    const int rows_per = g_.h_out * g_.w_out;
    const int kkc = k_ * k_ * c_in_;
    x_ = x;
    cols_ = Tensor<T>({b * rows_per, kkc});
    const std::size_t img_sz = x.size() / b;
    for (int i = 0; i < b; ++i)
      detail::im2col(x.data() + i * img_sz, g_,
                     cols_.data() + static_cast<std::size_t>(i) * rows_per * kkc);
    Tensor<T> y({b, g_.h_out, g_.w_out, c_out_});
    ConstMatMap<T> cm(cols_.data(), b * rows_per, kkc);
    ConstMatMap<T> wm(weight_.value.data(), kkc, c_out_);
    MatMap<T> ym(y.data(), b * rows_per, c_out_);
    ym.noalias() = cm * wm;
    ym.rowwise() += Eigen::Map<const Eigen::RowVector<T, Eigen::Dynamic>>(
        bias_.value.data(), c_out_);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool param_grads) override {
    const int b = dy.dim(0);
    const int rows_per = g_.h_out * g_.w_out;
    const int kkc = k_ * k_ * c_in_;
    ConstMatMap<T> dym(dy.data(), b * rows_per, c_out_);
    ConstMatMap<T> cm(cols_.data(), b * rows_per, kkc);
    ConstMatMap<T> wm(weight_.value.data(), kkc, c_out_);
    if (param_grads) {
      MatMap<T> dwm(weight_.grad.data(), kkc, c_out_);
      dwm.noalias() += cm.transpose() * dym;
      Eigen::Map<Eigen::RowVector<T, Eigen::Dynamic>> dbm(bias_.grad.data(),
                                                          c_out_);
      dbm += dym.colwise().sum();
    }
    Tensor<T> dcols({b * rows_per, kkc});
    MatMap<T> dcm(dcols.data(), b * rows_per, kkc);
    dcm.noalias() = dym * wm.transpose();
    Tensor<T> dx(x_.shape());
    const std::size_t img_sz = dx.size() / b;
    for (int i = 0; i < b; ++i)
      detail::col2im(dcols.data() + static_cast<std::size_t>(i) * rows_per * kkc,
                     g_, dx.data() + i * img_sz);
    return dx;
  }

  std::vector<Parameter<T>*> parameters() override {
    return {&weight_, &bias_};
  }
  std::string kind() const override { return "conv2d"; }

 private:
  int c_in_, c_out_, k_, stride_, pad_;
  Parameter<T> weight_, bias_;
  Tensor<T> x_, cols_;
  detail::ConvGeom g_{};
};

/// Transposed 2-D convolution (fractionally strided); the adjoint of a
/// Conv2d with the same kernel/stride/pad. Output H = stride*(H-1)+k-2*pad.
template <typename T>
class TransposedConv2d : public Layer<T> {
 public:
  TransposedConv2d(int c_in, int c_out, int k, int stride, int pad)
      : c_in_(c_in),
        c_out_(c_out),
        k_(k),
        stride_(stride),
        pad_(pad),
        weight_("weight", {k * k * c_out, c_in}),
        bias_("bias", {c_out}) {}

  void init(std::mt19937& rng) override {
    fill_normal<T>(weight_.value, rng, T(0), T(0.02));
    bias_.value.set_zero();
  }

  Tensor<T> forward(const Tensor<T>& x, bool) override {
    if (x.ndim() != 4 || x.dim(3) != c_in_)
      throw ArgumentError("tconv2d expects [B,H,W," + std::to_string(c_in_) +
                          "], got " + Tensor<T>::shape_string(x.shape()));
    const int b = x.dim(0), h = x.dim(1), w = x.dim(2);
    const int hy = stride_ * (h - 1) + k_ - 2 * pad_;
    const int wy = stride_ * (w - 1) + k_ - 2 * pad_;
    if (hy < 1 || wy < 1) throw ArgumentError("tconv2d output collapses");
    // The "image" of the adjoint conv is the output y.
    g_ = {hy, wy, c_out_, h, w, k_, stride_, pad_};
    x_ = x;
    const int kkc = k_ * k_ * c_out_;
    Tensor<T> cols({b * h * w, kkc});
    ConstMatMap<T> xm(x.data(), b * h * w, c_in_);
    ConstMatMap<T> wm(weight_.value.data(), kkc, c_in_);
    MatMap<T> cm(cols.data(), b * h * w, kkc);
    cm.noalias() = xm * wm.transpose();
    Tensor<T> y({b, hy, wy, c_out_});
    const std::size_t img_sz = static_cast<std::size_t>(hy) * wy * c_out_;
    for (int i = 0; i < b; ++i)
      detail::col2im(cols.data() + static_cast<std::size_t>(i) * h * w * kkc,
                     g_, y.data() + i * img_sz);
    T* yd = y.data();
    for (std::size_t i = 0; i < y.size(); ++i)
      yd[i] += bias_.value[i % static_cast<std::size_t>(c_out_)];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool param_grads) override {
    const int b = dy.dim(0);
    const int h = x_.dim(1), w = x_.dim(2);
    const int kkc = k_ * k_ * c_out_;
    Tensor<T> dcols({b * h * w, kkc});
    const std::size_t img_sz = dy.size() / b;
    for (int i = 0; i < b; ++i)
      detail::im2col(dy.data() + i * img_sz, g_,
                     dcols.data() + static_cast<std::size_t>(i) * h * w * kkc);
    ConstMatMap<T> dcm(dcols.data(), b * h * w, kkc);
    ConstMatMap<T> xm(x_.data(), b * h * w, c_in_);
    ConstMatMap<T> wm(weight_.value.data(), kkc, c_in_);
    if (param_grads) {
      MatMap<T> dwm(weight_.grad.data(), kkc, c_in_);
      dwm.noalias() += dcm.transpose() * xm;
      const T* dyd = dy.data();
      for (std::size_t i = 0; i < dy.size(); ++i)
        bias_.grad[i % static_cast<std::size_t>(c_out_)] += dyd[i];
    }
    Tensor<T> dx(x_.shape());
    MatMap<T> dxm(dx.data(), b * h * w, c_in_);
    dxm.noalias() = dcm * wm;
    return dx;
  }

  std::vector<Parameter<T>*> parameters() override {
    return {&weight_, &bias_};
  }
  std::string kind() const override { return "tconv2d"; }

 private:
  int c_in_, c_out_, k_, stride_, pad_;
  Parameter<T> weight_, bias_;
  Tensor<T> x_;
  detail::ConvGeom g_{};
};

/// Batch normalization over the trailing channel axis. In training mode the
/// batch statistics are used and the running statistics updated; in eval
/// mode the running statistics are used and no state changes.
template <typename T>
class BatchNorm : public Layer<T> {
 public:
  explicit BatchNorm(int channels, T momentum = T(0.9), T eps = T(1e-5))
      : c_(channels),
        momentum_(momentum),
        eps_(eps),
        gamma_("gamma", {channels}),
        beta_("beta", {channels}),
        running_mean_("running_mean", {channels}),
        running_var_("running_var", {channels}) {}

  void init(std::mt19937&) override {
    std::fill(gamma_.value.vec().begin(), gamma_.value.vec().end(), T(1));
    beta_.value.set_zero();
    running_mean_.value.set_zero();
    std::fill(running_var_.value.vec().begin(), running_var_.value.vec().end(),
              T(1));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (x.dim(x.ndim() - 1) != c_)
      throw ArgumentError("batchnorm channel mismatch");
    const std::size_t n = x.size() / static_cast<std::size_t>(c_);
    Tensor<T> y(x.shape());
    if (training) {
      mean_ = Tensor<T>({c_});
      invstd_ = Tensor<T>({c_});
      for (int c = 0; c < c_; ++c) {
        T m = T(0);
        for (std::size_t i = 0; i < n; ++i) m += x[i * c_ + c];
        m /= static_cast<T>(n);
        T v = T(0);
        for (std::size_t i = 0; i < n; ++i) {
          const T d = x[i * c_ + c] - m;
          v += d * d;
        }
        v /= static_cast<T>(n);
        mean_[c] = m;
        invstd_[c] = T(1) / std::sqrt(v + eps_);
        running_mean_.value[c] =
            momentum_ * running_mean_.value[c] + (T(1) - momentum_) * m;
        running_var_.value[c] =
            momentum_ * running_var_.value[c] + (T(1) - momentum_) * v;
      }
      xhat_ = Tensor<T>(x.shape());
      for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < c_; ++c) {
          const T xh = (x[i * c_ + c] - mean_[c]) * invstd_[c];
          xhat_[i * c_ + c] = xh;
          y[i * c_ + c] = gamma_.value[c] * xh + beta_.value[c];
        }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < c_; ++c) {
          const T inv = T(1) / std::sqrt(running_var_.value[c] + eps_);
          y[i * c_ + c] = gamma_.value[c] * (x[i * c_ + c] - running_mean_.value[c]) * inv +
                          beta_.value[c];
        }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool param_grads) override {
    const std::size_t n = dy.size() / static_cast<std::size_t>(c_);
    Tensor<T> dx(dy.shape());
    for (int c = 0; c < c_; ++c) {
      T sum_dy = T(0), sum_dy_xhat = T(0);
      for (std::size_t i = 0; i < n; ++i) {
        sum_dy += dy[i * c_ + c];
        sum_dy_xhat += dy[i * c_ + c] * xhat_[i * c_ + c];
      }
      if (param_grads) {
        gamma_.grad[c] += sum_dy_xhat;
        beta_.grad[c] += sum_dy;
      }
      const T scale = gamma_.value[c] * invstd_[c] / static_cast<T>(n);
      for (std::size_t i = 0; i < n; ++i)
        dx[i * c_ + c] = scale * (static_cast<T>(n) * dy[i * c_ + c] - sum_dy -
                                  xhat_[i * c_ + c] * sum_dy_xhat);
    }
    return dx;
  }

  std::vector<Parameter<T>*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<Parameter<T>*> buffers() override {
    return {&running_mean_, &running_var_};
  }
  std::string kind() const override { return "batchnorm"; }

 private:
  int c_;
  T momentum_, eps_;
  Parameter<T> gamma_, beta_, running_mean_, running_var_;
  Tensor<T> mean_, invstd_, xhat_;
};

/// Owned stack of layers applied in order.
template <typename T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  template <typename L, typename... Args>
  L* add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L* raw = layer.get();
    layers_.push_back(std::move(layer));
    return raw;
  }

  void init(std::mt19937& rng) {
    for (auto& l : layers_) l->init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h, training);
    return h;
  }

  Tensor<T> backward(const Tensor<T>& dy, bool param_grads = true) {
    Tensor<T> g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
      g = (*it)->backward(g, param_grads);
    return g;
  }

  /// Parameters with stable hierarchical names ("l0.dense.weight", ...).
  std::vector<Parameter<T>*> parameters() {
    return collect(&Layer<T>::parameters);
  }
  std::vector<Parameter<T>*> buffers() { return collect(&Layer<T>::buffers); }

  std::size_t num_layers() const { return layers_.size(); }
  Layer<T>* layer(std::size_t i) { return layers_[i].get(); }

  void rename_parameters() {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const std::string prefix =
          "l" + std::to_string(i) + "." + layers_[i]->kind() + ".";
      for (auto* p : layers_[i]->parameters())
        if (p->name.rfind(prefix, 0) != 0) p->name = prefix + p->name;
      for (auto* p : layers_[i]->buffers())
        if (p->name.rfind(prefix, 0) != 0) p->name = prefix + p->name;
    }
  }

 private:
  std::vector<Parameter<T>*> collect(
      std::vector<Parameter<T>*> (Layer<T>::*getter)()) {
    rename_parameters();
    std::vector<Parameter<T>*> out;
    for (auto& l : layers_)
      for (auto* p : ((*l).*getter)()) out.push_back(p);
    return out;
  }

  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

/// Adaptive moment estimation with bias correction.
template <typename T>
class Adam {
 public:
  Adam(T lr = T(2e-4), T beta1 = T(0.5), T beta2 = T(0.999), T eps = T(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<Parameter<T>*>& params) {
    if (m_.empty()) {
      for (auto* p : params) {
        m_.emplace_back(p->value.shape());
        v_.emplace_back(p->value.shape());
      }
    }
    if (m_.size() != params.size())
      throw ArgumentError("optimizer bound to a different parameter set");
    ++t_;
    const T bc1 = T(1) - std::pow(beta1_, static_cast<T>(t_));
    const T bc2 = T(1) - std::pow(beta2_, static_cast<T>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter<T>& p = *params[i];
      for (std::size_t j = 0; j < p.value.size(); ++j) {
        const T g = p.grad[j];
        m_[i][j] = beta1_ * m_[i][j] + (T(1) - beta1_) * g;
        v_[i][j] = beta2_ * v_[i][j] + (T(1) - beta2_) * g * g;
        const T mhat = m_[i][j] / bc1;
        const T vhat = v_[i][j] / bc2;
        p.value[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  static void zero_grads(const std::vector<Parameter<T>*>& params) {
    for (auto* p : params) p->zero_grad();
  }

  long steps_taken() const { return t_; }

 private:
  T lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Tensor<T>> m_, v_;
};

}  // namespace agan

#endif  // AGAN_NN_HPP
