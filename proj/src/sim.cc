// Copyright 2026 The Tilewright Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sim.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "error.h"

namespace tw {
namespace {

// A dense row-major f32 block; rank 0 is a scalar.
struct Tile {
  std::vector<int64_t> shape;
  std::vector<float> data;
};

int64_t Numel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t s : shape) n *= s;
  return n;
}

std::vector<int64_t> BroadcastShapes(const std::vector<int64_t>& a,
                                     const std::vector<int64_t>& b) {
  const size_t rank = std::max(a.size(), b.size());
  std::vector<int64_t> out(rank);
  for (size_t i = 0; i < rank; ++i) {
    int64_t x = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    int64_t y = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (x != y && x != 1 && y != 1) {
      Fail(ErrorCode::kInternal, "tile shapes do not broadcast");
    }
    out[i] = x == 1 ? y : x;
  }
  return out;
}

// Element strides of `src` viewed with shape `out`; broadcast dims get 0.
std::vector<int64_t> ViewStrides(const std::vector<int64_t>& src,
                                 const std::vector<int64_t>& out) {
  std::vector<int64_t> strides(out.size(), 0);
  int64_t s = 1;
  for (size_t i = src.size(); i-- > 0;) {
    const size_t o = i + (out.size() - src.size());
    strides[o] = src[i] == 1 ? 0 : s;
    s *= src[i];
  }
  return strides;
}

Tile BroadcastTo(const Tile& t, const std::vector<int64_t>& shape) {
  if (t.shape == shape) return t;
  Tile out{shape, {}};
  out.data.reserve(Numel(shape));
  const auto st = ViewStrides(t.shape, shape);
  ForEachIndex(shape, [&](std::span<const int64_t> idx) {
    int64_t off = 0;
    for (size_t d = 0; d < idx.size(); ++d) off += idx[d] * st[d];
    out.data.push_back(t.data[off]);
  });
  return out;
}

template <typename F>
Tile Binary(const Tile& a, const Tile& b, F f) {
  std::vector<int64_t> shape = BroadcastShapes(a.shape, b.shape);
  Tile x = BroadcastTo(a, shape);
  Tile y = BroadcastTo(b, shape);
  for (size_t i = 0; i < x.data.size(); ++i) x.data[i] = f(x.data[i], y.data[i]);
  return x;
}

template <typename F>
Tile Unary(Tile a, F f) {
  for (float& v : a.data) v = f(v);
  return a;
}

Tile Reduce(const Tile& a, int axis, bool is_sum) {
  std::vector<int64_t> shape = a.shape;
  const int64_t n = shape[axis];
  shape.erase(shape.begin() + axis);
  int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= a.shape[d];
  for (size_t d = axis + 1; d < a.shape.size(); ++d) inner *= a.shape[d];
  Tile out{shape, std::vector<float>(outer * inner)};
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t i = 0; i < inner; ++i) {
      double sum = 0.0;
      float best = -std::numeric_limits<float>::infinity();
      for (int64_t k = 0; k < n; ++k) {
        float v = a.data[(o * n + k) * inner + i];
        sum += v;
        best = std::max(best, v);
      }
      out.data[o * inner + i] = is_sum ? static_cast<float>(sum) : best;
    }
  }
  return out;
}

Tile Dot(const Tile& a, const Tile& b) {
  const int64_t m = a.shape[0], k = a.shape[1], n = b.shape[1];
  if (b.shape[0] != k) Fail(ErrorCode::kInternal, "dot extents differ");
  Tile out{{m, n}, std::vector<float>(m * n)};
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t p = 0; p < k; ++p) {
        acc += static_cast<double>(a.data[i * k + p]) * b.data[p * n + j];
      }
      out.data[i * n + j] = static_cast<float>(acc);
    }
  }
  return out;
}

Tile ScalarTile(float v) { return Tile{{}, {v}}; }

struct ParamPlan {
  const IndexMap* map = nullptr;
  Tensor tensor;
  CompiledExpr offset;
  std::vector<std::pair<CompiledExpr, CompiledExpr>> mask;
  std::vector<int64_t> lane_sizes;
};

// Everything derived once per launch; read-only while programs run.
class Plan {
 public:
  Plan(const CompiledKernel& kernel, const TensorArgs& args,
       const Binding& binding)
      : kernel_(kernel) {
    for (const auto& [name, v] : binding) {
      slots_[name] = static_cast<int>(base_.size());
      base_.push_back(v);
    }
    pid_slot_ = AddSlot(kPidSymbol);
    for (size_t i = 0; i < kernel.grid.sizes.size(); ++i) {
      pid_slots_.push_back(AddSlot(PidVar(static_cast<int>(i))));
      grid_sizes_.push_back(Eval(kernel.grid.sizes[i], binding));
    }
    size_t lanes = 0, nests = 0;
    for (const IndexMap& m : kernel.index_maps) {
      lanes = std::max(lanes, m.lane_sizes.size());
      nests = std::max(nests, m.nest_sizes.size());
    }
    lane_base_ = static_cast<int>(base_.size());
    for (size_t j = 0; j < lanes; ++j) AddSlot(LaneVar(static_cast<int>(j)));
    nest_base_ = static_cast<int>(base_.size());
    for (size_t k = 0; k < nests; ++k) AddSlot(NestVar(static_cast<int>(k)));
    CollectLoopVars(kernel.application);

    for (const IndexMap& m : kernel.index_maps) {
      ParamPlan p;
      p.map = &m;
      p.tensor = args.at(m.param);
      p.offset = CompiledExpr(m.offset, slots_);
      for (const MaskTerm& t : m.mask) {
        p.mask.emplace_back(CompiledExpr(t.index, slots_),
                            CompiledExpr(t.bound, slots_));
      }
      for (const SymExpr& s : m.lane_sizes) p.lane_sizes.push_back(Eval(s, binding));
      params_[m.param] = std::move(p);
    }
    for (const ParamDecl& d : kernel.spec.params) {
      if (d.is_scalar()) scalars_[d.name] = args.at(d.name).buffer()[0];
    }
    PrepareStmts(kernel.application, binding);
  }

  const CompiledKernel& kernel() const { return kernel_; }
  const std::vector<int64_t>& base() const { return base_; }
  int slot(const std::string& name) const { return slots_.at(name); }
  int pid_slot() const { return pid_slot_; }
  int lane_base() const { return lane_base_; }
  int nest_base() const { return nest_base_; }
  const std::vector<int>& pid_slots() const { return pid_slots_; }
  const std::vector<int64_t>& grid_sizes() const { return grid_sizes_; }
  const ParamPlan& param(const std::string& name) const { return params_.at(name); }
  bool is_scalar(const std::string& name) const { return scalars_.count(name) > 0; }
  float scalar(const std::string& name) const { return scalars_.at(name); }
  bool is_loop_var(const std::string& name) const { return loop_vars_.count(name) > 0; }
  const CompiledExpr& index(const TileNode* n) const { return index_code_.at(n); }
  const std::vector<int64_t>& zeros_shape(const TileNode* n) const {
    return zeros_shapes_.at(n);
  }

 private:
  int AddSlot(const std::string& name) {
    auto [it, inserted] = slots_.emplace(name, static_cast<int>(base_.size()));
    if (inserted) base_.push_back(0);
    return it->second;
  }

  void CollectLoopVars(const std::vector<TileStmt>& stmts) {
    for (const TileStmt& s : stmts) {
      if (s.kind == TileStmt::Kind::kFor) {
        loop_vars_.insert(s.name);
        AddSlot(s.name);
        CollectLoopVars(s.body);
      }
    }
  }

  void CompileIndex(const TileExpr& e) {
    index_code_.emplace(e.get(),
                        CompiledExpr(IndexExprOf(e, kernel_.arranged), slots_));
  }

  void PrepareExpr(const TileExpr& e, const Binding& binding) {
    if (!e) return;
    if (e->op == TileOp::kZeros) {
      std::vector<int64_t>& shape = zeros_shapes_[e.get()];
      for (const SymExpr& s : e->shape) shape.push_back(Eval(s, binding));
    }
    if (e->op == TileOp::kShapeOf || e->op == TileOp::kSymValue) CompileIndex(e);
    if (e->op == TileOp::kLoad) {
      for (const TileExpr& i : e->args) CompileIndex(i);
      return;
    }
    for (const TileExpr& a : e->args) PrepareExpr(a, binding);
  }

  void PrepareStmts(const std::vector<TileStmt>& stmts, const Binding& binding) {
    for (const TileStmt& s : stmts) {
      if (s.kind == TileStmt::Kind::kFor) {
        CompileIndex(s.value);
        PrepareStmts(s.body, binding);
        continue;
      }
      for (const TileExpr& i : s.nest) CompileIndex(i);
      PrepareExpr(s.value, binding);
    }
  }

  const CompiledKernel& kernel_;
  std::map<std::string, int> slots_;
  std::vector<int64_t> base_;
  int pid_slot_ = 0;
  int lane_base_ = 0;
  int nest_base_ = 0;
  std::vector<int> pid_slots_;
  std::vector<int64_t> grid_sizes_;
  std::map<std::string, ParamPlan> params_;
  std::map<std::string, float> scalars_;
  std::set<std::string> loop_vars_;
  std::map<const TileNode*, CompiledExpr> index_code_;
  std::map<const TileNode*, std::vector<int64_t>> zeros_shapes_;
};

class Program {
 public:
  Program(const Plan& plan, const LaunchOptions& options, int64_t pid)
      : plan_(plan), options_(options), pid_(pid), values_(plan.base()) {
    values_[plan.pid_slot()] = pid;
    int64_t rest = pid;
    const auto& sizes = plan.grid_sizes();
    for (size_t i = sizes.size(); i-- > 0;) {
      values_[plan.pid_slots()[i]] = rest % sizes[i];
      rest /= sizes[i];
    }
  }

  void Run() { RunBlock(plan_.kernel().application); }

 private:
  void RunBlock(const std::vector<TileStmt>& stmts) {
    for (const TileStmt& s : stmts) {
      switch (s.kind) {
        case TileStmt::Kind::kLet:
          locals_[s.name] = Evaluate(s.value);
          break;
        case TileStmt::Kind::kAccumulate: {
          Tile& acc = locals_.at(s.name);
          acc = Binary(acc, Evaluate(s.value), std::plus<float>());
          break;
        }
        case TileStmt::Kind::kStore:
          Store(s);
          break;
        case TileStmt::Kind::kFor: {
          const int64_t extent = plan_.index(s.value.get()).Eval(values_);
          const int slot = plan_.slot(s.name);
          std::set<std::string> outer;
          for (const auto& [name, _] : locals_) outer.insert(name);
          for (int64_t i = 0; i < extent; ++i) {
            values_[slot] = i;
            RunBlock(s.body);
            std::erase_if(locals_, [&](const auto& kv) {
              return !outer.count(kv.first);
            });
          }
          break;
        }
      }
    }
  }

  void BindNest(const std::vector<TileExpr>& nest) {
    const int base = plan_.nest_base();
    for (size_t k = 0; k < nest.size(); ++k) {
      values_[base + k] = plan_.index(nest[k].get()).Eval(values_);
    }
  }

  // Calls fn(flat lane index, buffer offset or -1 when masked).
  template <typename Fn>
  void ForEachLane(const ParamPlan& p, Fn&& fn) {
    const int lane_base = plan_.lane_base();
    int64_t flat = 0;
    const int64_t buffer_size = p.tensor.buffer_size();
    ForEachIndex(p.lane_sizes, [&](std::span<const int64_t> idx) {
      for (size_t j = 0; j < idx.size(); ++j) values_[lane_base + j] = idx[j];
      bool active = true;
      for (const auto& [index, bound] : p.mask) {
        if (index.Eval(values_) >= bound.Eval(values_)) {
          active = false;
          break;
        }
      }
      int64_t off = -1;
      if (active) {
        off = p.offset.Eval(values_);
        if (off < 0 || off >= buffer_size) {
          Fail(ErrorCode::kInternal,
               "unmasked access to '" + p.map->param + "' at offset " +
                   std::to_string(off) + " outside its buffer of " +
                   std::to_string(buffer_size) + " (program " +
                   std::to_string(pid_) + ")");
        }
      }
      fn(flat++, off);
    });
  }

  Tile Load(const TileNode& n) {
    if (plan_.is_scalar(n.name)) return ScalarTile(plan_.scalar(n.name));
    const ParamPlan& p = plan_.param(n.name);
    BindNest(n.args);
    const float fill = static_cast<float>(n.fill.value_or(0.0));
    Tile out{p.lane_sizes, std::vector<float>(Numel(p.lane_sizes))};
    const float* buf = p.tensor.buffer();
    ForEachLane(p, [&](int64_t flat, int64_t off) {
      out.data[flat] = off < 0 ? fill : buf[off];
    });
    return out;
  }

  void Store(const TileStmt& s) {
    const ParamPlan& p = plan_.param(s.name);
    Tile v = BroadcastTo(Evaluate(s.value), p.lane_sizes);
    BindNest(s.nest);
    float* buf = const_cast<float*>(p.tensor.buffer());
    ForEachLane(p, [&](int64_t flat, int64_t off) {
      if (off < 0) return;
      buf[off] = v.data[flat];
      if (options_.on_store) options_.on_store(s.name, off, pid_);
    });
  }

  Tile Evaluate(const TileExpr& e) {
    switch (e->op) {
      case TileOp::kLoad:
        return Load(*e);
      case TileOp::kLocal:
        if (plan_.is_loop_var(e->name)) {
          return ScalarTile(static_cast<float>(values_[plan_.slot(e->name)]));
        }
        return locals_.at(e->name);
      case TileOp::kConst:
        return ScalarTile(static_cast<float>(e->value));
      case TileOp::kAdd:
        return Binary(Evaluate(e->args[0]), Evaluate(e->args[1]), std::plus<float>());
      case TileOp::kSub:
        return Binary(Evaluate(e->args[0]), Evaluate(e->args[1]), std::minus<float>());
      case TileOp::kMul:
        return Binary(Evaluate(e->args[0]), Evaluate(e->args[1]),
                      std::multiplies<float>());
      case TileOp::kDiv:
        return Binary(Evaluate(e->args[0]), Evaluate(e->args[1]),
                      std::divides<float>());
      case TileOp::kExp:
        return Unary(Evaluate(e->args[0]), [](float x) {
          return static_cast<float>(std::exp(static_cast<double>(x)));
        });
      case TileOp::kSqrt:
        return Unary(Evaluate(e->args[0]), [](float x) {
          return static_cast<float>(std::sqrt(static_cast<double>(x)));
        });
      case TileOp::kNeg:
        return Unary(Evaluate(e->args[0]), [](float x) { return -x; });
      case TileOp::kSigmoid:
        return Unary(Evaluate(e->args[0]), [](float x) {
          return static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(x))));
        });
      case TileOp::kDot:
        return Dot(Evaluate(e->args[0]), Evaluate(e->args[1]));
      case TileOp::kZeros: {
        const std::vector<int64_t>& shape = plan_.zeros_shape(e.get());
        return Tile{shape, std::vector<float>(Numel(shape), 0.0f)};
      }
      case TileOp::kSum:
        return Reduce(Evaluate(e->args[0]), e->axis, /*is_sum=*/true);
      case TileOp::kMax:
        return Reduce(Evaluate(e->args[0]), e->axis, /*is_sum=*/false);
      case TileOp::kShapeOf:
      case TileOp::kSymValue:
        return ScalarTile(
            static_cast<float>(plan_.index(e.get()).Eval(values_)));
    }
    Fail(ErrorCode::kInternal, "unhandled tile op");
  }

  const Plan& plan_;
  const LaunchOptions& options_;
  int64_t pid_;
  std::vector<int64_t> values_;
  std::map<std::string, Tile> locals_;
};

bool IsSizeSymbol(const KernelSpec& spec, const std::string& name) {
  for (const ParamDecl& p : spec.params) {
    for (int i = 0; i < p.rank; ++i) {
      if (name == p.name + "_size_" + std::to_string(i)) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> RequiredMeta(const CompiledKernel& kernel) {
  std::vector<std::string> out;
  for (const std::string& name : kernel.symbols.names()) {
    if (kernel.symbols.IsConstexpr(name) && !IsSizeSymbol(kernel.spec, name)) {
      out.push_back(name);
    }
  }
  return out;
}

Binding LaunchBinding(const CompiledKernel& kernel, const TensorArgs& args,
                      const Binding& meta) {
  Binding binding;
  for (const auto& [name, _] : args) {
    if (!kernel.spec.FindParam(name)) {
      Fail(ErrorCode::kLaunch, "unknown argument '" + name + "'");
    }
  }
  for (const ParamDecl& p : kernel.spec.params) {
    auto it = args.find(p.name);
    if (it == args.end()) {
      Fail(ErrorCode::kLaunch, "missing argument '" + p.name + "'");
    }
    const Tensor& t = it->second;
    if (t.rank() != p.rank) {
      Fail(ErrorCode::kLaunch, "argument '" + p.name + "' has rank " +
                                   std::to_string(t.rank()) + ", expected " +
                                   std::to_string(p.rank));
    }
    for (int i = 0; i < p.rank; ++i) {
      binding[p.name + "_size_" + std::to_string(i)] = t.shape()[i];
      binding[p.name + "_stride_" + std::to_string(i)] = t.strides()[i];
    }
  }
  const std::vector<std::string> required = RequiredMeta(kernel);
  for (const auto& [name, value] : meta) {
    if (std::find(required.begin(), required.end(), name) == required.end()) {
      Fail(ErrorCode::kLaunch, "'" + name + "' is not a meta-parameter of '" +
                                   kernel.spec.name + "'");
    }
    if (value <= 0) {
      Fail(ErrorCode::kLaunch, "meta-parameter " + name + "=" +
                                   std::to_string(value) + " must be positive");
    }
    binding[name] = value;
  }
  for (const std::string& name : required) {
    if (!meta.count(name)) {
      Fail(ErrorCode::kLaunch, "meta-parameter '" + name + "' is not bound");
    }
  }
  for (const ShapeCheck& c : kernel.launch_checks) {
    int64_t lhs = 0, rhs = 0;
    try {
      lhs = Eval(c.lhs, binding);
      rhs = Eval(c.rhs, binding);
    } catch (const Error& e) {
      Fail(ErrorCode::kLaunch, "shape check '" + c.what + "': " + e.what());
    }
    if (lhs != rhs) {
      Fail(ErrorCode::kLaunch, "shape check failed: " + c.what + " (" +
                                   ToInfix(c.lhs) + " = " + std::to_string(lhs) +
                                   ", " + ToInfix(c.rhs) + " = " +
                                   std::to_string(rhs) + ")");
    }
  }
  return binding;
}

LaunchInfo Launch(const CompiledKernel& kernel, TensorArgs& args,
                  const Binding& meta, const LaunchOptions& options) {
  LaunchInfo info;
  info.binding = LaunchBinding(kernel, args, meta);
  info.programs = Eval(kernel.grid.total, info.binding);
  if (info.programs < 0) Fail(ErrorCode::kLaunch, "negative grid size");
  const Plan plan(kernel, args, info.binding);

  auto run = [&](int64_t pid) {
    Program(plan, options, pid).Run();
  };
  const int64_t n = info.programs;
  auto pid_at = [&](int64_t i) { return options.reverse ? n - 1 - i : i; };
  const int threads =
      static_cast<int>(std::clamp<int64_t>(options.threads, 1, std::max<int64_t>(n, 1)));
  if (threads == 1) {
    for (int64_t i = 0; i < n; ++i) run(pid_at(i));
    return info;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int64_t i = t; i < n; i += threads) run(pid_at(i));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return info;
}

}  // namespace tw
